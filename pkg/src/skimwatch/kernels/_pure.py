"""Pure-Python twin of the compiled kernels.

Same observable behavior as ``_core.pyx``; equivalence is enforced by tests.
Keep both in sync when touching either.
"""

CRC16_POLY = 0x1021
CRC16_INIT = 0xFFFF


def _build_crc_table():
    table = []
    for byte in range(256):
        crc = byte << 8
        for _ in range(8):
            if crc & 0x8000:
                crc = ((crc << 1) ^ CRC16_POLY) & 0xFFFF
            else:
                crc = (crc << 1) & 0xFFFF
        table.append(crc)
    return table


_CRC_TABLE = _build_crc_table()


def crc16(data, crc=CRC16_INIT):
    """CRC-16/CCITT-FALSE over data, continuing from crc."""
    for b in data:
        crc = ((crc << 8) & 0xFF00) ^ _CRC_TABLE[((crc >> 8) ^ b) & 0xFF]
    return crc


def diff_blobs(frame, background, width, height, threshold, min_area):
    """8-connected components of |frame - background| >= threshold.

    frame/background are row-major 8-bit buffers of width*height pixels.
    Returns unsorted [(centroid_x, centroid_y, area)] for components with
    area >= min_area; centroids are mean pixel coordinates.
    """
    n = width * height
    mask = bytearray(n)
    for i in range(n):
        d = frame[i] - background[i]
        if d < 0:
            d = -d
        if d >= threshold:
            mask[i] = 1

    seen = bytearray(n)
    blobs = []
    stack = []
    for start in range(n):
        if not mask[start] or seen[start]:
            continue
        seen[start] = 1
        stack.append(start)
        area = 0
        sum_x = 0
        sum_y = 0
        while stack:
            idx = stack.pop()
            y, x = divmod(idx, width)
            area += 1
            sum_x += x
            sum_y += y
            y0 = y - 1 if y > 0 else 0
            y1 = y + 1 if y + 1 < height else height - 1
            x0 = x - 1 if x > 0 else 0
            x1 = x + 1 if x + 1 < width else width - 1
            for ny in range(y0, y1 + 1):
                row = ny * width
                for nx in range(x0, x1 + 1):
                    j = row + nx
                    if mask[j] and not seen[j]:
                        seen[j] = 1
                        stack.append(j)
        if area >= min_area:
            blobs.append((sum_x / area, sum_y / area, area))
    return blobs

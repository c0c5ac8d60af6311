# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of kernels._pure; keep both in sync."""

from libc.stdlib cimport free, malloc

cdef unsigned short CRC16_POLY = 0x1021

cdef unsigned short _CRC_TABLE[256]

cdef void _build_crc_table():
    cdef int byte, bit
    cdef unsigned int crc
    for byte in range(256):
        crc = byte << 8
        for bit in range(8):
            if crc & 0x8000:
                crc = ((crc << 1) ^ CRC16_POLY) & 0xFFFF
            else:
                crc = (crc << 1) & 0xFFFF
        _CRC_TABLE[byte] = <unsigned short>crc

_build_crc_table()


def crc16(data, crc=0xFFFF):
    """CRC-16/CCITT-FALSE over data, continuing from crc."""
    cdef const unsigned char[:] buf = data
    cdef unsigned int c = crc
    cdef Py_ssize_t i, n = buf.shape[0]
    for i in range(n):
        c = ((c << 8) & 0xFF00) ^ _CRC_TABLE[((c >> 8) ^ buf[i]) & 0xFF]
    return c


def diff_blobs(frame, background, int width, int height, int threshold, int min_area):
    """8-connected components of |frame - background| >= threshold.

    Same contract as kernels._pure.diff_blobs.
    """
    cdef const unsigned char[:] f = frame
    cdef const unsigned char[:] g = background
    cdef Py_ssize_t n = <Py_ssize_t>width * height
    if f.shape[0] < n or g.shape[0] < n:
        raise ValueError("buffer shorter than width*height")

    cdef unsigned char* mask = <unsigned char*>malloc(n)
    cdef unsigned char* seen = <unsigned char*>malloc(n)
    cdef Py_ssize_t* stack = <Py_ssize_t*>malloc(n * sizeof(Py_ssize_t))
    if mask == NULL or seen == NULL or stack == NULL:
        free(mask); free(seen); free(stack)
        raise MemoryError()

    cdef Py_ssize_t i, start, idx, top, row, j
    cdef int d, x, y, nx, ny, x0, x1, y0, y1
    cdef long long area, sum_x, sum_y
    blobs = []
    try:
        for i in range(n):
            d = f[i] - g[i]
            if d < 0:
                d = -d
            mask[i] = 1 if d >= threshold else 0
            seen[i] = 0

        for start in range(n):
            if not mask[start] or seen[start]:
                continue
            seen[start] = 1
            stack[0] = start
            top = 1
            area = 0
            sum_x = 0
            sum_y = 0
            while top > 0:
                top -= 1
                idx = stack[top]
                y = <int>(idx / width)
                x = <int>(idx - <Py_ssize_t>y * width)
                area += 1
                sum_x += x
                sum_y += y
                y0 = y - 1 if y > 0 else 0
                y1 = y + 1 if y + 1 < height else height - 1
                x0 = x - 1 if x > 0 else 0
                x1 = x + 1 if x + 1 < width else width - 1
                for ny in range(y0, y1 + 1):
                    row = <Py_ssize_t>ny * width
                    for nx in range(x0, x1 + 1):
                        j = row + nx
                        if mask[j] and not seen[j]:
                            seen[j] = 1
                            stack[top] = j
                            top += 1
            if area >= min_area:
                blobs.append((sum_x / <double>area, sum_y / <double>area, <int>area))
    finally:
        free(mask)
        free(seen)
        free(stack)
    return blobs

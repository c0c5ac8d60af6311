"""Builds the optional compiled kernel extension.

The package works without it (pure-Python twin is selected at import);
Cython and a C compiler are only needed for the fast path.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "skimwatch.kernels._core",
                ["src/skimwatch/kernels/_core.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)

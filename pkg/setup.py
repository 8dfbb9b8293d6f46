"""Build script: compiles the optional Cython reduction core.

The package works without the extension (a numpy fallback with identical
operation order is selected at import time), so any failure to cythonize or
compile simply produces a pure-Python install.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "qclab._kernels._core",
                sources=["src/qclab/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                # -ffp-contract=off: forbid FMA contraction so the compiled
                # lane reproduces the fallback lane bit for bit.
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)

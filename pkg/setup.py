"""Optional build of the compiled kernel core.

The package is fully functional without the extension (a pure-Python
backend is selected at import time).  Building the extension needs
Cython and a C compiler:

    python setup.py build_ext --inplace

or, for an install with compiled kernels:

    pip install -e . --no-build-isolation
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("RIDEMARKET_SKIP_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "ridemarket.kernels._core",
                    ["src/ridemarket/kernels/_core.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)

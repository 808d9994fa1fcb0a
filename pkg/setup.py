"""Build script: compiles the optional walk kernel.

The package is fully functional without the extension (a numpy fallback is
selected at import time); set RIUENT_PURE=1 to skip compilation explicitly.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("RIUENT_PURE") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "riuent._kernels._native",
                    ["src/riuent/_kernels/_native.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        # No Cython/numpy at build time: ship pure.
        ext_modules = []

setup(ext_modules=ext_modules)

"""Build script for the optional compiled kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed compile degrades to a pure-Python install
instead of aborting.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext = Extension(
        "hgmeans._core",
        ["src/hgmeans/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    ext_modules = cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
except Exception as exc:  # pragma: no cover - depends on build host
    sys.stderr.write(
        f"warning: compiled kernels skipped ({exc}); "
        "installing with the pure-Python backend only\n"
    )
    ext_modules = []

setup(ext_modules=ext_modules)

"""Build hook for the optional compiled kernels.

The package is fully functional without the extension (a pure-Python twin
of every kernel ships in tarskicert._speedups_py); set TARSKICERT_NO_EXT=1
to skip compilation entirely.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("TARSKICERT_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "tarskicert._speedups",
                    ["src/tarskicert/_speedups.pyx"],
                    language="c++",
                    extra_compile_args=["-O2"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)

"""Build hook for the optional compiled evaluation kernels.

The package is fully functional without the extension: udcop.kernels falls
back to the numpy implementation when the compiled module is absent.
"""

from setuptools import setup
from setuptools.extension import Extension

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("udcop._kernels", ["src/udcop/_kernels.pyx"])],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)

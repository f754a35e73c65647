"""Build hook for the optional compiled kernels.

The package works without the extension; ocrkit.kernels falls back to the
pure-Python implementation when the build is unavailable.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    extensions = []
else:
    extensions = cythonize(
        [
            Extension(
                "ocrkit._editcore",
                ["src/ocrkit/_editcore.pyx"],
                optional=True,
            )
        ],
        language_level="3",
    )

setup(ext_modules=extensions)

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "falq.kernels._bitpack_cy",
                ["src/falq/kernels/_bitpack_cy.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # No Cython: the package still works through the numpy fallback
    # selected in falq.kernels at import time.
    ext_modules = []

setup(ext_modules=ext_modules)

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("CVSCAN_SKIP_EXT"):
    from Cython.Build import cythonize

    ext = Extension(
        "cvscan.nn._kernels",
        sources=["src/cvscan/nn/_kernels.pyx"],
        extra_compile_args=["-O3"],
    )
    ext_modules = cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)

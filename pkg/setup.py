import os

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

numpy_dir = os.path.dirname(np.__file__)
openmp = os.environ.get("DUOMODE_NO_OPENMP") is None

extensions = [
    Extension(
        "duomode._kernels._sde_core",
        ["src/duomode/_kernels/_sde_core.pyx"],
        include_dirs=[np.get_include()],
        library_dirs=[os.path.join(numpy_dir, "random", "lib"), os.path.join(numpy_dir, "_core", "lib")],
        libraries=["npyrandom", "npymath"],
        # no contraction: results must match the numpy fallback bit for bit
        extra_compile_args=["-O3", "-ffp-contract=off"] + (["-fopenmp"] if openmp else []),
        extra_link_args=["-fopenmp"] if openmp else [],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))

import os

import numpy as np
from setuptools import Extension, setup

# The extension is optional: projevo.kernels falls back to numpy when it is missing.
ext_modules = []
if os.environ.get("PROJEVO_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "projevo._ckernels",
                    ["src/projevo/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)

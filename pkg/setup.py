"""Build the optional compiled slot kernel.

The package works without it: ``traconflow.sim`` falls back to the
pure-Python engine when the extension cannot be imported.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("TRACONFLOW_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "traconflow.sim._ckernel",
                    ["src/traconflow/sim/_ckernel.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)

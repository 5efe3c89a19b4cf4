from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "scalevec.cbow._kernel_c",
                ["src/scalevec/cbow/_kernel_c.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3", "-ffast-math"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    # No Cython at build time: install pure-Python; the numpy training
    # backend is selected automatically at import.
    ext_modules = []

setup(ext_modules=ext_modules)

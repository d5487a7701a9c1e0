"""Build script: compiles the optional kernel extension when Cython and a
C toolchain are available, and falls back to the pure-Python kernels
otherwise (the package is fully functional either way)."""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class _OptionalBuildExt(build_ext):
    """Never fail the install over the optional extension."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any build failure is ok
            warnings.warn(
                f"skipping compiled kernels ({exc!r}); "
                f"using the pure-Python fallback", stacklevel=1)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            warnings.warn(
                f"skipping compiled kernel {ext.name} ({exc!r}); "
                f"using the pure-Python fallback", stacklevel=1)


def _extensions():
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    return cythonize(
        [Extension(
            "lieflow._kernels",
            ["src/lieflow/_kernels.pyx"],
            extra_compile_args=["-O3"],
        )],
        language_level="3",
    )


setup(
    ext_modules=_extensions(),
    cmdclass={"build_ext": _OptionalBuildExt},
)

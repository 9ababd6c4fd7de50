import os

from setuptools import setup

ext_modules = []
cmdclass = {}

if os.environ.get("SSCAVI_PURE_PYTHON") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
        from setuptools.command.build_ext import build_ext

        class OptionalBuildExt(build_ext):
            """Build the compiled sweep kernels when a toolchain is available.

            The package is fully functional without them; sscavi.backend falls
            back to the pure-numpy kernels at import time.
            """

            def run(self):
                try:
                    super().run()
                except Exception as exc:  # no compiler, broken toolchain, ...
                    self._warn(exc)

            def build_extension(self, ext):
                try:
                    super().build_extension(ext)
                except Exception as exc:
                    self._warn(exc)

            @staticmethod
            def _warn(exc):
                print(
                    f"WARNING: compiled sweep kernels not built ({exc}); "
                    "sscavi will use the pure-Python backend."
                )

        ext_modules = cythonize(
            [Extension("sscavi._sweeps", ["src/sscavi/_sweeps.pyx"])],
            compiler_directives={"language_level": "3"},
        )
        cmdclass["build_ext"] = OptionalBuildExt
    except ImportError:
        print("WARNING: Cython not available; building sscavi without compiled kernels.")

setup(ext_modules=ext_modules, cmdclass=cmdclass)

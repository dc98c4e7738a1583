from importlib.metadata import version, PackageNotFoundError

try:
    __version__ = version("sdds_lab")
    __version_tuple__ = tuple(int(p) for p in __version__.split(".")[:3] if p.isdigit())
except PackageNotFoundError:
    # package not installed
    __version__ = "0.0.0"
    __version_tuple__ = (0, 0, 0)

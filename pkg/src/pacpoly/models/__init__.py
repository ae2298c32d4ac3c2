"""Bundled example models."""

from importlib import resources


def example_path(name: str) -> str:
    """Filesystem path of a bundled ``.pm`` file, e.g. ``example_path("coin")``."""
    res = resources.files(__package__).joinpath(f"{name}.pm")
    if not res.is_file():
        raise FileNotFoundError(f"no bundled model named {name!r}")
    return str(res)


def example_text(name: str) -> str:
    return resources.files(__package__).joinpath(f"{name}.pm").read_text()

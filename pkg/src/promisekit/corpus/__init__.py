"""Bundled example models, shipped as package data."""
from importlib import resources


def names() -> list[str]:
    return sorted(
        entry.name
        for entry in resources.files(__package__).iterdir()
        if entry.name.endswith(".pml")
    )


def path(name: str):
    return resources.files(__package__) / name


def read(name: str) -> str:
    return path(name).read_text(encoding="utf-8")

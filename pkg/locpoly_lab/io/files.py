import os
from pathlib import Path
from typing import Union

PathLike = Union[str, os.PathLike]


def atomic_write_text(path: PathLike, text: str, overwrite: bool = True) -> Path:
    """Write ``text`` next to ``path`` and move it into place, so readers never see half a file."""
    target = Path(path)
    if target.exists() and not overwrite:
        raise FileExistsError(f"{target} already exists; set overwrite=True to replace it.")
    target.parent.mkdir(parents=True, exist_ok=True)

    if text and not text.endswith("\n"):
        text += "\n"
    tmp = target.with_suffix(target.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    os.replace(tmp, target)
    return target.resolve()

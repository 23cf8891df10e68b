"""
Run manifests: a plain key=value record that fully determines a CLI run.

Example:
    command=enhance
    version=1.0.0
    seed=1
    method=dehret:msr
    input.0=in.png
    output.0=out.png
    param.sigmas=15.0,80.0,250.0
    param.weights=none
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from dualhaze import __version__
from dualhaze.core.errors import ErrorCode, ImageIOError, MethodParseError

MANIFEST_SUFFIX = ".manifest"


def format_value(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list | tuple):
        return ",".join(format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def manifest_path(output: str | Path) -> Path:
    """Manifests live next to the output as `<output>.manifest`."""
    output = Path(output)
    return output.with_name(output.name + MANIFEST_SUFFIX)


class RunManifest(BaseModel):
    model_config = ConfigDict(frozen=True)

    command: str
    seed: int
    method: str | None = None
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()
    params: dict[str, str] = Field(default_factory=dict)
    version: str = __version__

    @classmethod
    def create(
        cls,
        command: str,
        seed: int,
        inputs: list[Path] | list[str],
        outputs: list[Path] | list[str],
        params: dict[str, Any],
        method: str | None = None,
    ) -> RunManifest:
        return cls(
            command=command,
            seed=seed,
            method=method,
            inputs=tuple(str(p) for p in inputs),
            outputs=tuple(str(p) for p in outputs),
            params={k: format_value(v) for k, v in sorted(params.items())},
        )

    def overrides(self) -> list[str]:
        """Parameters as `key=value` strings, the form the method parser takes."""
        return [f"{k}={v}" for k, v in self.params.items()]

    def to_text(self) -> str:
        lines = [f"command={self.command}", f"version={self.version}", f"seed={self.seed}"]
        if self.method is not None:
            lines.append(f"method={self.method}")
        lines += [f"input.{i}={p}" for i, p in enumerate(self.inputs)]
        lines += [f"output.{i}={p}" for i, p in enumerate(self.outputs)]
        lines += [f"param.{k}={v}" for k, v in self.params.items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> RunManifest:
        fields: dict[str, Any] = {}
        inputs: dict[int, str] = {}
        outputs: dict[int, str] = {}
        params: dict[str, str] = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise MethodParseError(
                    code=ErrorCode.USAGE_BAD_MANIFEST,
                    message=f"Manifest line {lineno} is not key=value: '{line}'",
                )
            group, _, name = key.partition(".")
            try:
                if group == "input" and name:
                    inputs[int(name)] = value
                elif group == "output" and name:
                    outputs[int(name)] = value
                elif group == "param" and name:
                    params[name] = value
                else:
                    fields[key] = value
            except ValueError:
                raise MethodParseError(
                    code=ErrorCode.USAGE_BAD_MANIFEST,
                    message=f"Manifest line {lineno} has a bad index: '{key}'",
                ) from None
        missing = {"command", "seed"} - set(fields)
        if missing:
            raise MethodParseError(
                code=ErrorCode.USAGE_BAD_MANIFEST,
                message=f"Manifest lacks required keys: {', '.join(sorted(missing))}",
            )
        try:
            return cls(
                **fields,
                inputs=tuple(inputs[i] for i in sorted(inputs)),
                outputs=tuple(outputs[i] for i in sorted(outputs)),
                params=params,
            )
        except ValueError as e:
            raise MethodParseError(
                code=ErrorCode.USAGE_BAD_MANIFEST,
                message=f"Invalid manifest: {e}",
                original_error=e,
            ) from None

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(self.to_text(), encoding="utf-8")
        except OSError as e:
            raise ImageIOError(
                code=ErrorCode.IO_ENCODE_FAILED,
                message=f"Could not write manifest: {path}",
                original_error=e,
            ) from None
        return path

    @classmethod
    def load(cls, path: str | Path) -> RunManifest:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise ImageIOError(code=ErrorCode.IO_NOT_FOUND, message=f"No such manifest: {path}") from None
        except OSError as e:
            raise ImageIOError(
                code=ErrorCode.IO_DECODE_FAILED,
                message=f"Could not read manifest: {path}",
                original_error=e,
            ) from None
        return cls.from_text(text)

"""Headless DOM driver for interaction probing.

The abstract contract is: load a local page, enumerate the four probe-able
control kinds in document order, and probe one element at a time against a
freshly reloaded page, comparing DOM digests that exclude the probed
control's own value state. The bundled implementation runs a Node subprocess
with jsdom; no network is ever touched beyond the local document.
"""

from __future__ import annotations

import json
import os
import shutil
import subprocess
from abc import ABC, abstractmethod
from importlib import resources
from typing import Literal

from pydantic import BaseModel

ElementKind = Literal["button", "slider", "checkbox", "dropdown"]


class PageLoadFailed(Exception):
    pass


class DispatchFailed(Exception):
    def __init__(self, element: "InteractiveElement", reason: str):
        self.element = element
        super().__init__(f"dispatch on {element.locator} failed: {reason}")


class InteractiveElement(BaseModel):
    kind: ElementKind
    locator: str
    index: int
    label: str | None = None
    context: str | None = None
    disabled: bool = False


class ProbeResult(BaseModel):
    element: InteractiveElement
    changed: bool
    before_digest: str
    after_digest: str


class BrowserDriver(ABC):
    @abstractmethod
    def load(self, html: str) -> None: ...

    @abstractmethod
    def enumerate_elements(self) -> list[InteractiveElement]: ...

    @abstractmethod
    def probe(self, element: InteractiveElement) -> ProbeResult: ...

    @abstractmethod
    def close(self) -> None: ...

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _node_search_paths() -> str:
    paths = []
    cur = os.getcwd()
    while True:
        candidate = os.path.join(cur, "node_modules")
        if os.path.isdir(candidate):
            paths.append(candidate)
        parent = os.path.dirname(cur)
        if parent == cur:
            break
        cur = parent
    try:
        out = subprocess.run(["npm", "root", "-g"], capture_output=True,
                             text=True, timeout=30)
        if out.returncode == 0 and out.stdout.strip():
            paths.append(out.stdout.strip())
    except Exception:
        pass
    existing = os.environ.get("NODE_PATH")
    if existing:
        paths.append(existing)
    return os.pathsep.join(paths)


class JsdomDriver(BrowserDriver):
    """Probes pages inside a Node subprocess running jsdom."""

    def __init__(self, settle_ms: int = 500):
        self.settle_ms = settle_ms
        node = shutil.which("node")
        if node is None:
            raise PageLoadFailed("node executable not found; the DOM probe needs Node.js")
        helper = resources.files("docweave").joinpath("evalkit/domprobe.mjs")
        env = dict(os.environ, NODE_PATH=_node_search_paths())
        self._proc = subprocess.Popen(
            [node, str(helper)],
            stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            text=True, encoding="utf-8", env=env)

    def _rpc(self, payload: dict) -> dict:
        if self._proc.poll() is not None:
            raise PageLoadFailed("DOM probe subprocess exited")
        self._proc.stdin.write(json.dumps(payload) + "\n")
        self._proc.stdin.flush()
        line = self._proc.stdout.readline()
        if not line:
            raise PageLoadFailed("DOM probe subprocess closed its output")
        return json.loads(line)

    def load(self, html: str) -> None:
        resp = self._rpc({"cmd": "load", "html": html, "settle_ms": min(self.settle_ms, 100)})
        if not resp.get("ok"):
            raise PageLoadFailed(resp.get("error", "load failed"))

    def load_file(self, path: str) -> None:
        try:
            with open(path, encoding="utf-8") as fh:
                self.load(fh.read())
        except OSError as exc:
            raise PageLoadFailed(str(exc)) from exc

    def enumerate_elements(self) -> list[InteractiveElement]:
        resp = self._rpc({"cmd": "enumerate"})
        if not resp.get("ok"):
            raise PageLoadFailed(resp.get("error", "enumerate failed"))
        return [InteractiveElement.model_validate(e) for e in resp["elements"]]

    def probe(self, element: InteractiveElement) -> ProbeResult:
        resp = self._rpc({"cmd": "probe", "index": element.index,
                          "settle_ms": self.settle_ms})
        if not resp.get("ok"):
            raise DispatchFailed(element, resp.get("error", "probe failed"))
        return ProbeResult(element=element, changed=resp["changed"],
                           before_digest=resp["before"],
                           after_digest=resp["after"])

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._rpc({"cmd": "close"})
            except Exception:
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()

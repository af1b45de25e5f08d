"""HTML fragment checks and text extraction built on the stdlib parser.

Well-formedness here means tag balance and nesting under a forgiving parse,
not standards validation: generated fragments routinely use benign constructs
a strict validator would reject.
"""

from __future__ import annotations

import re
from html.parser import HTMLParser

VOID_ELEMENTS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
})

BLOCK_ELEMENTS = frozenset({
    "address", "article", "aside", "blockquote", "div", "dl", "dd", "dt",
    "fieldset", "figure", "figcaption", "footer", "form", "h1", "h2", "h3",
    "h4", "h5", "h6", "header", "hr", "li", "main", "nav", "ol", "p", "pre",
    "section", "table", "tr", "td", "th", "ul", "br",
})


class UnparseablePage(Exception):
    pass


class _BalanceChecker(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.stack: list[str] = []
        self.errors: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag not in VOID_ELEMENTS:
            self.stack.append(tag)

    def handle_endtag(self, tag):
        if tag in VOID_ELEMENTS:
            return
        if tag in self.stack:
            # close any implicitly terminated children first
            while self.stack and self.stack[-1] != tag:
                self.errors.append(f"<{self.stack.pop()}> closed implicitly by </{tag}>")
            self.stack.pop()
        else:
            self.errors.append(f"stray closing tag </{tag}>")


def well_formed(fragment: str) -> bool:
    """True when every non-void tag closes properly in order."""
    checker = _BalanceChecker()
    try:
        checker.feed(fragment)
        checker.close()
    except Exception:
        return False
    return not checker.errors and not checker.stack


class _TagScanner(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.script_tags = 0
        self.external_refs: list[str] = []

    def handle_starttag(self, tag, attrs):
        attrs = dict(attrs)
        if tag == "script":
            self.script_tags += 1
            url = attrs.get("src")
            if url and _is_external(url):
                self.external_refs.append(url)
        elif tag == "link":
            url = attrs.get("href")
            if url and _is_external(url):
                self.external_refs.append(url)
        elif tag in ("img", "iframe", "source", "audio", "video"):
            url = attrs.get("src")
            if url and _is_external(url):
                self.external_refs.append(url)


def _is_external(url: str) -> bool:
    return bool(re.match(r"^(https?:)?//", url.strip(), re.IGNORECASE))


def contains_script(fragment: str) -> bool:
    scanner = _TagScanner()
    scanner.feed(fragment)
    scanner.close()
    return scanner.script_tags > 0


def external_references(fragment: str) -> list[str]:
    """URLs in script/link/img-style references that leave the local document."""
    scanner = _TagScanner()
    scanner.feed(fragment)
    scanner.close()
    return scanner.external_refs


class _TextExtractor(HTMLParser):
    _SKIP = ("script", "style")

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.blocks: list[list[str]] = [[]]
        self._skip_depth = 0

    def _break(self):
        if self.blocks[-1]:
            self.blocks.append([])

    def handle_starttag(self, tag, attrs):
        if tag in self._SKIP:
            self._skip_depth += 1
        elif tag in BLOCK_ELEMENTS:
            self._break()

    def handle_endtag(self, tag):
        if tag in self._SKIP:
            self._skip_depth = max(0, self._skip_depth - 1)
        elif tag in BLOCK_ELEMENTS:
            self._break()

    def handle_data(self, data):
        if not self._skip_depth:
            self.blocks[-1].append(data)


def extract_main_text(html: str) -> str:
    """Visible text in DOM order: script/style bodies dropped, whitespace
    collapsed within blocks, blocks separated by single newlines."""
    extractor = _TextExtractor()
    try:
        extractor.feed(html)
        extractor.close()
    except Exception as exc:
        raise UnparseablePage(str(exc)) from exc
    out = []
    for block in extractor.blocks:
        text = re.sub(r"\s+", " ", "".join(block)).strip()
        if text:
            out.append(text)
    return "\n".join(out)

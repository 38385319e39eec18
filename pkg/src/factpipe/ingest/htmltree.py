"""Lightweight HTML element tree with a CSS-subset selector engine.

Extraction rules in site profiles are query strings over this tree.
Supported grammar:

    selector  = compound ((" " | " > ") compound)* ["::attr(NAME)" | "::text"]
    compound  = [tag] ("#id" | ".class" | "[name]" | "[name=value]")*

Descendant (space) and child (">") combinators only. A trailing
``::attr(name)`` extracts an attribute value instead of text content;
``::text`` (the default) extracts collapsed text with tags stripped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import Iterator, Optional, Union


class SelectorError(ValueError):
    """Raised for selector strings the engine cannot parse."""


_VOID_TAGS = {
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
}

_SKIP_TEXT_TAGS = {"script", "style", "template", "noscript"}

_BLOCK_TAGS = {
    "address", "article", "aside", "blockquote", "br", "div", "dd", "dl",
    "dt", "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2",
    "h3", "h4", "h5", "h6", "header", "hr", "li", "main", "nav", "ol", "p",
    "pre", "section", "table", "td", "th", "tr", "ul",
}


@dataclass
class Element:
    tag: str
    attrs: dict[str, str]
    parent: Optional["Element"] = None
    children: list[Union["Element", str]] = field(default_factory=list)

    def get(self, name: str, default: str | None = None) -> str | None:
        return self.attrs.get(name, default)

    @property
    def classes(self) -> set[str]:
        return set(self.attrs.get("class", "").split())

    def __repr__(self) -> str:  # keeps pytest diffs readable
        return f"<Element {self.tag} attrs={self.attrs}>"


class _TreeBuilder(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.root = Element("#document", {})
        self._stack = [self.root]

    def _open(self, tag: str, attrs: list[tuple[str, str | None]]) -> Element:
        el = Element(tag, {k: (v if v is not None else "") for k, v in attrs})
        el.parent = self._stack[-1]
        self._stack[-1].children.append(el)
        return el

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        el = self._open(tag, attrs)
        if tag not in _VOID_TAGS:
            self._stack.append(el)

    def handle_startendtag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        self._open(tag, attrs)

    def handle_endtag(self, tag: str) -> None:
        # Pop to the matching open tag; ignore stray end tags.
        for i in range(len(self._stack) - 1, 0, -1):
            if self._stack[i].tag == tag:
                del self._stack[i:]
                return

    def handle_data(self, data: str) -> None:
        if data:
            self._stack[-1].children.append(data)


def parse_html(text: str) -> Element:
    """Parse HTML into an element tree rooted at a synthetic #document node."""
    builder = _TreeBuilder()
    builder.feed(text)
    builder.close()
    return builder.root


def iter_elements(root: Element) -> Iterator[Element]:
    """Yield descendant elements of ``root`` in document order."""
    for child in root.children:
        if isinstance(child, Element):
            yield child
            yield from iter_elements(child)


def text_content(el: Element) -> str:
    """Text of the subtree with tags stripped and whitespace collapsed.

    Script/style subtrees are skipped; block-level boundaries become
    spaces so tightly packed markup does not glue words together.
    """
    parts: list[str] = []

    def walk(node: Element) -> None:
        for child in node.children:
            if isinstance(child, str):
                parts.append(child)
                continue
            if child.tag in _SKIP_TEXT_TAGS:
                continue
            block = child.tag in _BLOCK_TAGS
            if block:
                parts.append(" ")
            walk(child)
            if block:
                parts.append(" ")

    walk(el)
    return " ".join("".join(parts).split())


# --- selector parsing -------------------------------------------------------

_ATTR_OUT = re.compile(r"::attr\(\s*([^)\s]+)\s*\)\s*$")
_TEXT_OUT = re.compile(r"::text\s*$")

_TOKEN = re.compile(
    r"""
    (?P<tag>[a-zA-Z][\w-]*)
    | \#(?P<id>[\w-]+)
    | \.(?P<cls>[\w-]+)
    | \[\s*(?P<aname>[\w:.-]+)\s*(?:=\s*(?P<aval>"[^"]*"|'[^']*'|[^\]\s]+)\s*)?\]
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Compound:
    tag: str | None
    id_: str | None
    classes: tuple[str, ...]
    attrs: tuple[tuple[str, str | None], ...]  # (name, value or None=presence)


@dataclass(frozen=True)
class ParsedSelector:
    # steps[i] = (combinator to the step before it, compound); first combinator is "descendant"
    steps: tuple[tuple[str, _Compound], ...]
    attr_out: str | None  # attribute name for ::attr(...), else text extraction


def _parse_compound(token_text: str, selector: str) -> _Compound:
    tag = id_ = None
    classes: list[str] = []
    attrs: list[tuple[str, str | None]] = []
    pos = 0
    while pos < len(token_text):
        m = _TOKEN.match(token_text, pos)
        if m is None:
            raise SelectorError(f"cannot parse {selector!r} at {token_text[pos:]!r}")
        if m.group("tag"):
            if tag is not None or pos != 0:
                raise SelectorError(f"tag must lead the compound in {selector!r}")
            tag = m.group("tag").lower()
        elif m.group("id"):
            id_ = m.group("id")
        elif m.group("cls"):
            classes.append(m.group("cls"))
        else:
            value = m.group("aval")
            if value is not None and value[:1] in "\"'":
                value = value[1:-1]
            attrs.append((m.group("aname").lower(), value))
        pos = m.end()
    return _Compound(tag, id_, tuple(classes), tuple(attrs))


def parse_selector(selector: str) -> ParsedSelector:
    work = selector.strip()
    attr_out = None
    m = _ATTR_OUT.search(work)
    if m:
        attr_out = m.group(1)
        work = work[: m.start()].strip()
    else:
        m = _TEXT_OUT.search(work)
        if m:
            work = work[: m.start()].strip()
    if not work:
        raise SelectorError(f"empty selector: {selector!r}")

    # Normalize child combinators so a single split on whitespace works.
    work = re.sub(r"\s*>\s*", " > ", work)
    tokens = work.split()
    steps: list[tuple[str, _Compound]] = []
    combinator = "descendant"
    for token in tokens:
        if token == ">":
            if combinator == "child" or not steps:
                raise SelectorError(f"misplaced '>' in {selector!r}")
            combinator = "child"
            continue
        steps.append((combinator, _parse_compound(token, selector)))
        combinator = "descendant"
    if combinator == "child":
        raise SelectorError(f"dangling '>' in {selector!r}")
    return ParsedSelector(tuple(steps), attr_out)


def _matches_compound(el: Element, c: _Compound) -> bool:
    if c.tag is not None and el.tag != c.tag:
        return False
    if c.id_ is not None and el.attrs.get("id") != c.id_:
        return False
    if c.classes and not set(c.classes) <= el.classes:
        return False
    for name, value in c.attrs:
        if name not in el.attrs:
            return False
        if value is not None and el.attrs[name] != value:
            return False
    return True


def _matches_chain(el: Element, steps: tuple[tuple[str, _Compound], ...], i: int) -> bool:
    if i == 0:
        return True
    combinator = steps[i][0]
    prev = steps[i - 1][1]
    if combinator == "child":
        parent = el.parent
        return (
            parent is not None
            and _matches_compound(parent, prev)
            and _matches_chain(parent, steps, i - 1)
        )
    ancestor = el.parent
    while ancestor is not None:
        if _matches_compound(ancestor, prev) and _matches_chain(ancestor, steps, i - 1):
            return True
        ancestor = ancestor.parent
    return False


def select(root: Element, selector: str | ParsedSelector) -> list[Element]:
    """All elements under ``root`` matching ``selector``, in document order."""
    parsed = parse_selector(selector) if isinstance(selector, str) else selector
    steps = parsed.steps
    last = steps[-1][1]
    return [
        el
        for el in iter_elements(root)
        if _matches_compound(el, last) and _matches_chain(el, steps, len(steps) - 1)
    ]


def select_first(root: Element, selector: str | ParsedSelector) -> Element | None:
    matches = select(root, selector)
    return matches[0] if matches else None


def extract_value(root: Element, selector: str) -> str | None:
    """Apply a selector and return the extracted string, or None on no match.

    Returns the first match's text content, or the named attribute when
    the selector carries a ``::attr(...)`` suffix.
    """
    parsed = parse_selector(selector)
    el = select_first(root, parsed)
    if el is None:
        return None
    if parsed.attr_out is not None:
        value = el.attrs.get(parsed.attr_out)
        return value.strip() if value is not None else None
    return text_content(el)

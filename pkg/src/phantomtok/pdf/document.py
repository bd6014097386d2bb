"""The parsed document graph and read-only navigation over it."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator

from phantomtok.errors import CircularReference, PdfError
from phantomtok.pdf.filters import decode_stream
from phantomtok.pdf.objects import PdfValue, Ref, Stream

ObjectId = tuple[int, int]

MAX_REF_CHAIN = 32
_INHERITABLE = ("Resources", "MediaBox", "CropBox", "Rotate")


@dataclass(frozen=True)
class Document:
    """A PDF as an object map plus trailer.

    Treat instances as immutable; transformations build a new Document with
    :meth:`with_objects`.
    """

    version: str
    objects: dict[ObjectId, PdfValue]
    trailer: dict
    page_order: list[ObjectId] = field(default_factory=list)

    def resolve(self, value: PdfValue, max_chain: int = MAX_REF_CHAIN) -> PdfValue:
        """Follow references until a direct value. Missing objects are null."""
        hops = 0
        while isinstance(value, Ref):
            hops += 1
            if hops > max_chain:
                raise CircularReference(f"reference chain through {value} exceeds {max_chain}")
            value = self.objects.get((value.num, value.gen))
        return value

    def get(self, obj_id: ObjectId) -> PdfValue:
        return self.objects.get(obj_id)

    @property
    def catalog(self) -> dict:
        root = self.resolve(self.trailer.get("Root"))
        if not isinstance(root, dict):
            raise PdfError("trailer /Root does not resolve to a catalog dictionary")
        return root

    def page(self, index: int) -> dict:
        return self.objects[self.page_order[index]]

    def inherited(self, page_id: ObjectId, key: str) -> PdfValue:
        """Look ``key`` up on the page, then on its ancestors."""
        node = self.objects.get(page_id)
        seen = set()
        while isinstance(node, dict):
            if key in node:
                return self.resolve(node[key])
            parent = node.get("Parent")
            if not isinstance(parent, Ref) or parent in seen:
                return None
            seen.add(parent)
            node = self.resolve(parent)
        return None

    def page_resources(self, page_id: ObjectId) -> dict:
        res = self.inherited(page_id, "Resources")
        return res if isinstance(res, dict) else {}

    def content_streams(self, page_id: ObjectId) -> list[Stream]:
        contents = self.resolve(self.objects[page_id].get("Contents"))
        if contents is None:
            return []
        if isinstance(contents, Stream):
            return [contents]
        if isinstance(contents, list):
            return [s for s in (self.resolve(c) for c in contents) if isinstance(s, Stream)]
        raise PdfError(f"page {page_id} has malformed /Contents")

    def page_content(self, page_id: ObjectId) -> bytes:
        """Decoded content of a page, with multiple streams joined by newlines."""
        return b"\n".join(decode_stream(s, self) for s in self.content_streams(page_id))

    def decode(self, stream: Stream) -> bytes:
        return decode_stream(stream, self)

    def next_object_number(self) -> int:
        return max((num for num, _ in self.objects), default=0) + 1

    def with_objects(self, updates: dict[ObjectId, PdfValue]) -> "Document":
        objects = dict(self.objects)
        objects.update(updates)
        return replace(self, objects=objects, page_order=list(self.page_order))

    def iter_refs(self) -> Iterator[Ref]:
        """Every reference reachable from the trailer (each target visited once)."""
        seen: set[Ref] = set()
        stack: list[PdfValue] = [self.trailer]
        while stack:
            value = stack.pop()
            if isinstance(value, Ref):
                yield value
                if value in seen:
                    continue
                seen.add(value)
                stack.append(self.objects.get((value.num, value.gen)))
            elif isinstance(value, dict):
                stack.extend(value.values())
            elif isinstance(value, list):
                stack.extend(value)
            elif isinstance(value, Stream):
                stack.extend(value.attrs.values())


def collect_pages(objects: dict[ObjectId, PdfValue], trailer: dict) -> list[ObjectId]:
    """Page object ids in page-tree order, cycle-checked."""
    doc = Document("", objects, trailer)
    root = doc.catalog
    pages_ref = root.get("Pages")
    order: list[ObjectId] = []
    seen: set[Ref] = set()

    def walk(ref: PdfValue) -> None:
        if not isinstance(ref, Ref):
            return
        if ref in seen:
            raise CircularReference(f"page tree cycle at {ref}")
        seen.add(ref)
        node = doc.resolve(ref)
        if not isinstance(node, dict):
            return
        kind = node.get("Type")
        kids = doc.resolve(node.get("Kids"))
        if kind == "Page" or (kind != "Pages" and kids is None):
            order.append((ref.num, ref.gen))
            return
        for kid in kids or []:
            walk(kid)

    walk(pages_ref)
    return order

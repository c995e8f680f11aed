/** Render server-provided highlight spans.
 *
 * The service reports spans as byte offsets into the UTF-8 encoding of the
 * document text; they are mapped to character offsets here (never recomputed
 * with client-side matching) and wrapped in <mark> elements.
 */

import type { ByteSpan } from "./types.js";

function utf8Length(codePoint: number): number {
  if (codePoint <= 0x7f) return 1;
  if (codePoint <= 0x7ff) return 2;
  if (codePoint <= 0xffff) return 3;
  return 4;
}

/** Map a byte offset to its character (UTF-16 code unit) offset. */
export function byteToCharOffset(text: string, byteOffset: number): number {
  let bytes = 0;
  let chars = 0;
  while (chars < text.length) {
    if (bytes >= byteOffset) break;
    const codePoint = text.codePointAt(chars)!;
    bytes += utf8Length(codePoint);
    chars += codePoint > 0xffff ? 2 : 1;
  }
  return chars;
}

export interface CharSpan {
  start: number;
  end: number;
}

export function toCharSpans(text: string, spans: ByteSpan[]): CharSpan[] {
  return spans.map(([start, end]) => ({
    start: byteToCharOffset(text, start),
    end: byteToCharOffset(text, end),
  }));
}

/** Build the document body with <mark> wrappers around each span. */
export function renderHighlighted(
  doc: Document,
  text: string,
  spans: ByteSpan[],
): DocumentFragment {
  const fragment = doc.createDocumentFragment();
  let cursor = 0;
  for (const { start, end } of toCharSpans(text, spans)) {
    if (start > cursor) {
      fragment.appendChild(doc.createTextNode(text.slice(cursor, start)));
    }
    const mark = doc.createElement("mark");
    mark.textContent = text.slice(start, end);
    fragment.appendChild(mark);
    cursor = end;
  }
  if (cursor < text.length) {
    fragment.appendChild(doc.createTextNode(text.slice(cursor)));
  }
  return fragment;
}

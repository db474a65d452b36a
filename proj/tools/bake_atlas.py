#!/usr/bin/env python3
"""Bake a TrueType font into a textworld glyph atlas.

Usage: bake_atlas.py FONT.ttf OUT.atlas [--size 32] [--id NAME] [--corpus DIR ...]

The charset is printable ASCII, basic Greek and Cyrillic, plus every
character found in the given corpus directories, restricted to code points
the font's cmap actually maps.
"""

import argparse
import pathlib
import sys

from fontTools.ttLib import TTFont
from PIL import Image, ImageDraw, ImageFont


def collect_charset(corpus_dirs):
    chars = {chr(c) for c in range(0x20, 0x7F)}
    chars |= {chr(c) for c in range(0x391, 0x3CA)}
    chars |= {chr(c) for c in range(0x401, 0x460)}
    for d in corpus_dirs:
        for path in sorted(pathlib.Path(d).rglob("*.txt")):
            chars |= {ch for ch in path.read_text(encoding="utf-8") if ch.isprintable()}
    return sorted(chars)


def bake(font_path, out_path, size, font_id, corpus_dirs):
    cmap = TTFont(font_path).getBestCmap()
    font = ImageFont.truetype(str(font_path), size)
    ascent, descent = font.getmetrics()
    lines = [
        "textworld-glyph-atlas 1",
        f"# baked from {pathlib.Path(font_path).name} at {size}px",
        f"font {font_id}",
        f"line_height {ascent + descent}",
        f"ascent {ascent}",
        f"descent {descent}",
    ]
    count = 0
    for ch in collect_charset(corpus_dirs):
        if ord(ch) not in cmap:
            continue
        advance = font.getlength(ch)
        if ch == " ":
            lines.append(f"glyph 32 {advance:.3f} 0 0 0 0")
            count += 1
            continue
        x0, y0, x1, y1 = font.getbbox(ch, anchor="ls")
        w, h = max(0, x1 - x0), max(0, y1 - y0)
        lines.append(f"glyph {ord(ch)} {advance:.3f} {x0} {-y0} {w} {h}")
        if w and h:
            img = Image.new("L", (w, h), 0)
            ImageDraw.Draw(img).text((-x0, -y0), ch, font=font, fill=255, anchor="ls")
            px = img.load()
            for y in range(h):
                lines.append("".join("%x" % min(15, round(px[x, y] / 17)) for x in range(w)))
        count += 1
    lines.append("end")
    pathlib.Path(out_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return count


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("font")
    ap.add_argument("out")
    ap.add_argument("--size", type=int, default=32)
    ap.add_argument("--id", dest="font_id")
    ap.add_argument("--corpus", action="append", default=[])
    args = ap.parse_args()
    font_id = args.font_id or pathlib.Path(args.font).stem
    n = bake(args.font, args.out, args.size, font_id, args.corpus)
    print(f"{args.out}: {n} glyphs", file=sys.stderr)


if __name__ == "__main__":
    main()

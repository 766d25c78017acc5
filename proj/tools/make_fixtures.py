#!/usr/bin/env python3
"""Builds the IDX fixtures under tests/data/.

MNIST digits come from the `mnist` npm package (cazala/mnist), which bundles
~10k genuine MNIST images as JSON ([0,1] floats, 784 per image, one file per
digit). Letter images are rendered DejaVu glyphs (A-Z, white on black,
jittered placement and size): alphabetic characters that play the role of an
out-of-distribution pool against the digit corpus.

Usage:
  python3 tools/make_fixtures.py --mnist-dir <package>/src/digits --out-dir tests/data
"""

import argparse
import glob
import json
import os
import random
import struct

from PIL import Image, ImageDraw, ImageFont

SIDE = 28
TRAIN_PER_DIGIT = 400
TEST_PER_DIGIT = 160
LETTER_VARIANTS = 24  # 26 letters -> 624 pool images


def write_idx_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x803, len(images), SIDE, SIDE))
        for img in images:
            f.write(bytes(img))


def write_idx_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x801, len(labels)))
        f.write(bytes(labels))


def load_digit(mnist_dir, digit):
    with open(os.path.join(mnist_dir, f"{digit}.json")) as f:
        flat = json.load(f)["data"]
    n = len(flat) // (SIDE * SIDE)
    images = []
    for i in range(n):
        chunk = flat[i * 784:(i + 1) * 784]
        images.append([min(255, max(0, round(v * 255))) for v in chunk])
    return images


def find_font():
    import matplotlib
    ttf = os.path.join(os.path.dirname(matplotlib.__file__), "mpl-data/fonts/ttf/DejaVuSans-Bold.ttf")
    if os.path.exists(ttf):
        return ttf
    candidates = glob.glob("/usr/share/fonts/**/DejaVuSans-Bold.ttf", recursive=True)
    if not candidates:
        raise SystemExit("no DejaVu font found")
    return candidates[0]


def render_letters(font_path, rng):
    images, labels = [], []
    for index, letter in enumerate("ABCDEFGHIJKLMNOPQRSTUVWXYZ"):
        for _ in range(LETTER_VARIANTS):
            size = rng.randint(16, 24)
            dx = rng.randint(-3, 3)
            dy = rng.randint(-3, 3)
            font = ImageFont.truetype(font_path, size)
            canvas = Image.new("L", (SIDE, SIDE), 0)
            draw = ImageDraw.Draw(canvas)
            draw.text((SIDE // 2 + dx, SIDE // 2 + dy), letter, fill=255, font=font, anchor="mm")
            images.append(list(canvas.tobytes()))
            labels.append(index)
    return images, labels


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--mnist-dir", required=True, help="digits directory of the mnist npm package")
    ap.add_argument("--out-dir", default="tests/data")
    args = ap.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)

    train_images, train_labels, test_images, test_labels = [], [], [], []
    for digit in range(10):
        pool = load_digit(args.mnist_dir, digit)
        need = TRAIN_PER_DIGIT + TEST_PER_DIGIT
        if len(pool) < need:
            raise SystemExit(f"digit {digit}: only {len(pool)} images, need {need}")
        train_images += pool[:TRAIN_PER_DIGIT]
        train_labels += [digit] * TRAIN_PER_DIGIT
        test_images += pool[TRAIN_PER_DIGIT:need]
        test_labels += [digit] * TEST_PER_DIGIT

    write_idx_images(os.path.join(args.out_dir, "mnist_train_images.idx"), train_images)
    write_idx_labels(os.path.join(args.out_dir, "mnist_train_labels.idx"), train_labels)
    write_idx_images(os.path.join(args.out_dir, "mnist_test_images.idx"), test_images)
    write_idx_labels(os.path.join(args.out_dir, "mnist_test_labels.idx"), test_labels)

    letter_images, letter_labels = render_letters(find_font(), random.Random(77))
    write_idx_images(os.path.join(args.out_dir, "letters_images.idx"), letter_images)
    write_idx_labels(os.path.join(args.out_dir, "letters_labels.idx"), letter_labels)

    print(f"wrote {len(train_images)} train, {len(test_images)} test, {len(letter_images)} letters")


if __name__ == "__main__":
    main()

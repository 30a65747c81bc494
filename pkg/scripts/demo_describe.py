#!/usr/bin/env python3
"""Best-of-N captioning demo on the bundled toy images with mock backends.

Usage: python3 scripts/demo_describe.py [--n 10] [--temperature 0.8]
"""

import argparse
import json
import tempfile
from pathlib import Path

from reconscore import DescriberConfig, describe
from reconscore.backends import BlobStore, mock_backends
from reconscore.harness import load_dataset, load_image
from reconscore.scoring.recon import EvalContext

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=10)
    parser.add_argument("--temperature", type=float, default=0.8)
    parser.add_argument("--manifest", default=str(ROOT / "data/toy/manifest.json"))
    args = parser.parse_args()

    store = BlobStore(Path(tempfile.mkdtemp()) / "blobs")
    backends = mock_backends(store)
    ctx = EvalContext(t2i=backends.t2i, embedder=backends.image_embedder)
    config = DescriberConfig(n=args.n, temperature=args.temperature)

    for entry in load_dataset(args.manifest).entries:
        image = load_image(entry, store)
        caption, selection, cset = describe(image, backends.caption, ctx, config)
        print(json.dumps({
            "image_id": image.image_id,
            "caption": caption,
            "best_index": selection.best_index,
            "scores": [round(s, 4) for s in selection.scores],
            "tie_broken": selection.tie_broken,
        }, indent=2))


if __name__ == "__main__":
    main()

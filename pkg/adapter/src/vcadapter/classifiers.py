"""Image classifiers that emit (label, confidence) detections.

Two families live here: lightweight pixel-statistics classifiers that
run anywhere and are deterministic by construction, and wrappers around
pretrained networks (ResNet-152, CLIP zero-shot) that require downloaded
weights. Every classifier exposes the same interface: a ``source`` tag
and ``classify(image) -> [(label, confidence), ...]`` sorted by
confidence, at most ``top_k`` entries.
"""

from __future__ import annotations

import colorsys
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

TOP_K = 3


class ModelUnavailableError(RuntimeError):
    """A pretrained backend could not be loaded (missing weights,
    missing optional dependency, or no network to fetch them)."""


# Hue anchors (degrees) for the color-name classifier.
_HUE_NAMES = [
    (0.0, "red"),
    (30.0, "orange"),
    (60.0, "yellow"),
    (120.0, "green"),
    (180.0, "cyan"),
    (240.0, "blue"),
    (300.0, "magenta"),
    (360.0, "red"),
]


@dataclass
class ColorNameClassifier:
    """Labels an image by its dominant hues.

    Pixels are bucketed into named hue ranges; confidence is the mass
    fraction of saturated pixels falling in each bucket. Low-saturation
    images yield "gray"/"white"/"black" from the value channel instead.
    Deterministic, dependency-free, and honest about what it sees -- a
    solid red image really is classified "red" with confidence ~1.
    """

    source: str = "colorname"
    top_k: int = TOP_K

    def classify(self, image: Image.Image):
        rgb = np.asarray(image.convert("RGB"), dtype=np.float64) / 255.0
        pixels = rgb.reshape(-1, 3)
        maxc = pixels.max(axis=1)
        minc = pixels.min(axis=1)
        sat = np.where(maxc > 0, (maxc - minc) / np.maximum(maxc, 1e-12), 0.0)
        weights: dict[str, float] = {}
        n = len(pixels)
        saturated = sat >= 0.2
        if saturated.any():
            hues = np.array(
                [colorsys.rgb_to_hsv(*p)[0] * 360.0 for p in pixels[saturated]]
            )
            for hue in hues:
                name = min(_HUE_NAMES, key=lambda a: abs(a[0] - hue))[1]
                weights[name] = weights.get(name, 0.0) + 1.0 / n
        for v in maxc[~saturated]:
            name = "black" if v < 0.25 else "white" if v > 0.75 else "gray"
            weights[name] = weights.get(name, 0.0) + 1.0 / n
        ranked = sorted(weights.items(), key=lambda kv: (-kv[1], kv[0]))
        return [(label, round(conf, 6)) for label, conf in ranked[: self.top_k]]


@dataclass
class LuminanceClassifier:
    """Labels overall brightness and contrast from grayscale statistics.

    Emits "bright"/"dark"/"midtone" from mean luminance and
    "high contrast"/"flat" from its standard deviation, with confidences
    proportional to how far the statistic sits from its decision
    boundary. A second deterministic opinion so multi-classifier merges
    are exercised without any pretrained model.
    """

    source: str = "luminance"
    top_k: int = TOP_K

    def classify(self, image: Image.Image):
        gray = np.asarray(image.convert("L"), dtype=np.float64) / 255.0
        mean = float(gray.mean())
        std = float(gray.std())
        out = []
        if mean >= 0.5:
            out.append(("bright", min(1.0, 2.0 * (mean - 0.5) + 0.5)))
        else:
            out.append(("dark", min(1.0, 2.0 * (0.5 - mean) + 0.5)))
        if 0.35 <= mean <= 0.65:
            out.append(("midtone", 1.0 - abs(mean - 0.5)))
        out.append(("high contrast" if std >= 0.15 else "flat", min(1.0, 0.5 + std)))
        ranked = sorted(out, key=lambda kv: (-kv[1], kv[0]))
        return [(label, round(conf, 6)) for label, conf in ranked[: self.top_k]]


@dataclass
class Resnet152Classifier:
    """ImageNet top-k labels from torchvision's pretrained ResNet-152."""

    source: str = "resnet152"
    top_k: int = TOP_K
    _model: object = field(default=None, repr=False, compare=False)
    _labels: list = field(default=None, repr=False, compare=False)
    _preprocess: object = field(default=None, repr=False, compare=False)

    def _load(self):
        if self._model is not None:
            return
        try:
            import torch  # noqa: F401
            from torchvision import models

            weights = models.ResNet152_Weights.IMAGENET1K_V2
            self._model = models.resnet152(weights=weights).eval()
            self._labels = weights.meta["categories"]
            self._preprocess = weights.transforms()
        except Exception as exc:
            raise ModelUnavailableError(f"resnet152 unavailable: {exc}") from exc

    def classify(self, image: Image.Image):
        self._load()
        import torch

        with torch.no_grad():
            logits = self._model(self._preprocess(image.convert("RGB")).unsqueeze(0))
            probs = torch.softmax(logits[0], dim=0)
            conf, idx = torch.topk(probs, self.top_k)
        return [
            (self._labels[i].lower(), float(c)) for c, i in zip(conf, idx)
        ]


@dataclass
class ClipZeroShotClassifier:
    """Zero-shot labels via CLIP image/text similarity.

    The label vocabulary is open: by default the ImageNet category names
    from torchvision (prompted as "a photo of a {label}"), overridable
    with any label list. Confidences are the softmax over the vocabulary.
    """

    source: str = "clip"
    top_k: int = TOP_K
    model_name: str = "openai/clip-vit-base-patch32"
    labels: tuple = ()
    _model: object = field(default=None, repr=False, compare=False)
    _processor: object = field(default=None, repr=False, compare=False)

    def _load(self):
        if self._model is not None:
            return
        try:
            from transformers import CLIPModel, CLIPProcessor

            self._model = CLIPModel.from_pretrained(self.model_name).eval()
            self._processor = CLIPProcessor.from_pretrained(self.model_name)
            if not self.labels:
                from torchvision import models

                self.labels = tuple(
                    c.lower()
                    for c in models.ResNet152_Weights.IMAGENET1K_V2.meta["categories"]
                )
        except Exception as exc:
            raise ModelUnavailableError(f"clip unavailable: {exc}") from exc

    def classify(self, image: Image.Image):
        self._load()
        import torch

        prompts = [f"a photo of a {label}" for label in self.labels]
        inputs = self._processor(
            text=prompts, images=image.convert("RGB"), return_tensors="pt", padding=True
        )
        with torch.no_grad():
            probs = self._model(**inputs).logits_per_image.softmax(dim=1)[0]
            conf, idx = torch.topk(probs, self.top_k)
        return [(self.labels[i], float(c)) for c, i in zip(conf, idx)]


_REGISTRY = {
    "colorname": ColorNameClassifier,
    "luminance": LuminanceClassifier,
    "resnet152": Resnet152Classifier,
    "clip": ClipZeroShotClassifier,
}


def make_classifier(name: str):
    """Instantiate a classifier by its source tag."""
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise ValueError(
            f"unknown classifier {name!r}; choose from {sorted(_REGISTRY)}"
        ) from None

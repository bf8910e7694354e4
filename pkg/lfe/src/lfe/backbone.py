"""The 13-convolution, 5-max-pool VGG16 feature stack.

Layer indices follow the torchvision VGG16 `features` module, so ImageNet
checkpoints exported from torchvision load directly (their `features.`
prefix is stripped, classifier weights are ignored).
"""

from __future__ import annotations

from pathlib import Path

import torch
import torch.nn as nn

from .errors import MissingPretrainedWeights

CONV_PLAN = (64, 64, "M", 128, 128, "M", 256, 256, 256, "M", 512, 512, 512, "M", 512, 512, 512, "M")
POOL_DEPTHS = (64, 128, 256, 512, 512)


def build_backbone() -> nn.Sequential:
    layers: list[nn.Module] = []
    channels = 3
    for item in CONV_PLAN:
        if item == "M":
            layers.append(nn.MaxPool2d(kernel_size=2, stride=2))
        else:
            layers.append(nn.Conv2d(channels, item, kernel_size=3, padding=1))
            layers.append(nn.ReLU(inplace=True))
            channels = item
    return nn.Sequential(*layers)


def random_backbone(seed: int) -> nn.Sequential:
    """Backbone with seeded random initialization (for tests and smoke runs)."""
    torch.manual_seed(seed)
    return build_backbone()


def save_backbone(net: nn.Sequential, path, seed: int | None = None) -> None:
    torch.save({"state_dict": net.state_dict(), "seed": seed}, path)


def load_backbone(path) -> nn.Sequential:
    """Load backbone weights from a checkpoint file.

    Accepts this package's own checkpoints, bare backbone state dicts, and
    full torchvision VGG16 state dicts (`features.*` keys).
    """
    path = Path(path)
    if not path.exists():
        raise MissingPretrainedWeights(f"{path}: weights file not found")
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as exc:
        raise MissingPretrainedWeights(f"{path}: cannot read weights ({exc})") from exc
    state = payload.get("state_dict", payload) if isinstance(payload, dict) else payload
    if not isinstance(state, dict):
        raise MissingPretrainedWeights(f"{path}: not a state dict checkpoint")
    if any(key.startswith("features.") for key in state):
        state = {k[len("features."):]: v for k, v in state.items() if k.startswith("features.")}
    net = build_backbone()
    try:
        net.load_state_dict(state)
    except RuntimeError as exc:
        raise MissingPretrainedWeights(f"{path}: weights do not match the backbone ({exc})") from exc
    return net


def pretrained_backbone() -> nn.Sequential:
    """ImageNet-pretrained backbone via torchvision (needs the weight cache or network)."""
    try:
        from torchvision.models import VGG16_Weights, vgg16

        full = vgg16(weights=VGG16_Weights.IMAGENET1K_V1)
    except Exception as exc:
        raise MissingPretrainedWeights(
            f"pretrained VGG16 weights unavailable ({exc}); pass an explicit weights file"
        ) from exc
    net = build_backbone()
    net.load_state_dict(full.features.state_dict())
    return net

"""Fine-tuning and mid-layer feature extraction.

Extraction runs one forward pass per image set, grabs the output of each of
the five max-pool layers, and applies global average pooling, giving
64+128+256+512+512 = 1472 values per set (5888 over the four sets BI, CC,
DC, EC). Inputs are 8-bit 128x128 images scaled to [0, 1]; grayscale is
replicated to three channels. No mean/std normalization is applied, so a
zero image probes the bias path alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
import torch.nn as nn

from .backbone import POOL_DEPTHS
from .errors import ShapeMismatch, SplitEmpty

INPUT_SIZE = 128
SET_LENGTH = sum(POOL_DEPTHS)  # 1472
FOUR_SET_LENGTH = 4 * SET_LENGTH  # 5888


@dataclass(frozen=True)
class LfeConfig:
    epochs: int = 10
    batch_size: int = 32
    learning_rate: float = 1e-3
    discounting: float = 0.9
    input_size: int = INPUT_SIZE
    seed: int = 0


def prepare_image(image: np.ndarray) -> torch.Tensor:
    """8-bit (H, W[, C]) array to a float (3, H, W) tensor in [0, 1]."""
    arr = np.asarray(image)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or arr.shape[2] not in (1, 3):
        raise ShapeMismatch(f"expected (H, W), (H, W, 1) or (H, W, 3), got {arr.shape}")
    if arr.shape[:2] != (INPUT_SIZE, INPUT_SIZE):
        raise ShapeMismatch(f"expected {INPUT_SIZE}x{INPUT_SIZE} input, got {arr.shape[0]}x{arr.shape[1]}")
    if arr.shape[2] == 1:
        arr = np.repeat(arr, 3, axis=2)
    tensor = torch.from_numpy(np.ascontiguousarray(arr)).to(torch.float32) / 255.0
    return tensor.permute(2, 0, 1)


def forward_pools(net: nn.Sequential, batch: torch.Tensor) -> list[torch.Tensor]:
    """Run the stack and collect every max-pool output."""
    pools = []
    x = batch
    for layer in net:
        x = layer(x)
        if isinstance(layer, nn.MaxPool2d):
            pools.append(x)
    return pools


def pooled_features(net: nn.Sequential, image: np.ndarray) -> np.ndarray:
    """GAP of the five max-pool outputs of one image (length 1472)."""
    batch = prepare_image(image).unsqueeze(0)
    with torch.no_grad():
        pools = forward_pools(net, batch)
    parts = [p.mean(dim=(2, 3))[0] for p in pools]
    return torch.cat(parts).numpy().astype(np.float64)


def extract_local(image_sets, net: nn.Sequential) -> np.ndarray:
    """Concatenated pooled features of the given image sets, in order.

    Pass the four stacks [BI, CC, DC, EC] for the full 5888-length vector or
    a single set for 1472.
    """
    if len(image_sets) == 0:
        raise ShapeMismatch("no image sets given")
    net.eval()
    return np.concatenate([pooled_features(net, img) for img in image_sets])


class _FineTuneHead(nn.Module):
    """Throwaway classification head: GAP over the last pool, then softmax logits."""

    def __init__(self, n_classes: int):
        super().__init__()
        self.linear = nn.Linear(POOL_DEPTHS[-1], n_classes)

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        return self.linear(features.mean(dim=(2, 3)))


def fine_tune(images, labels, config: LfeConfig, net: nn.Sequential) -> list[float]:
    """Fine-tune every backbone layer on the given images.

    Returns the split's evaluation loss after each epoch. The classification
    head exists only for the duration of training; the backbone is updated in
    place.
    """
    if len(images) == 0:
        raise SplitEmpty("fine-tune split contains no images")
    if len(images) != len(labels):
        raise ValueError(f"{len(images)} images for {len(labels)} labels")
    labels = np.asarray(labels, dtype=np.int64)
    n_classes = int(labels.max()) + 1

    torch.manual_seed(config.seed)
    head = _FineTuneHead(n_classes)
    batch = torch.stack([prepare_image(img) for img in images])
    targets = torch.from_numpy(labels)

    optimizer = torch.optim.RMSprop(
        list(net.parameters()) + list(head.parameters()),
        lr=config.learning_rate,
        alpha=config.discounting,
    )
    loss_fn = nn.CrossEntropyLoss()
    order_rng = np.random.default_rng(config.seed)

    def split_loss() -> float:
        net.eval()
        with torch.no_grad():
            total = 0.0
            for start in range(0, len(images), config.batch_size):
                chunk = slice(start, start + config.batch_size)
                logits = head(forward_pools(net, batch[chunk])[-1])
                total += float(loss_fn(logits, targets[chunk])) * (logits.shape[0])
        net.train()
        return total / len(images)

    net.train()
    epoch_losses: list[float] = []
    for _ in range(config.epochs):
        order = order_rng.permutation(len(images))
        for start in range(0, len(images), config.batch_size):
            idx = order[start:start + config.batch_size]
            optimizer.zero_grad()
            pools = forward_pools(net, batch[idx])
            loss = loss_fn(head(pools[-1]), targets[idx])
            loss.backward()
            optimizer.step()
        epoch_losses.append(split_loss())
    net.eval()
    return epoch_losses


def export(vectors: np.ndarray, labels, path) -> None:
    """Write labeled vectors as an FVEC1 file readable by the fusion step."""
    from .files import write_fvec

    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2:
        raise ValueError(f"expected an (n, dim) matrix, got shape {vectors.shape}")
    if len(labels) != vectors.shape[0]:
        raise ValueError(f"{len(labels)} labels for {vectors.shape[0]} records")
    write_fvec(path, vectors, labels)

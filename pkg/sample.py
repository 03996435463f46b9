import numpy as np

from oslo import (
    CodecConfig,
    CodecModel,
    Direction,
    ErpImage,
    PixelId,
    decode_file,
    encode_file,
    erp_to_healpix,
    neighbors,
    rigidity_statistics,
    train,
    wspsnr_healpix,
)
from oslo.codec import to_output_range
from oslo.metrics import RdCurve, bd_rate


# Neighbors of a pixel, labeled by compass direction
record = neighbors(PixelId(0, 2))
print(f"North neighbor of pixel 0 at order 2: {record[Direction.N]}")


# Neighbor placement regularity
report = rigidity_statistics(6)
print(f"Mean relative std at order 6: {report.mean_rel_std_pct:.2f}%")


# An equirectangular image resampled to HEALPix
v, u = np.meshgrid(np.arange(64), np.arange(128), indexing="ij")
theta = np.pi * (v + 0.5) / 64
phi = 2.0 * np.pi * (u + 0.5) / 128
pixels = np.stack(
    [
        0.5 + 0.3 * np.cos(theta),
        0.5 + 0.2 * np.sin(theta) * np.cos(phi),
        0.5 + 0.2 * np.sin(theta) * np.sin(phi),
    ],
    axis=-1,
)
sphere_map = erp_to_healpix(ErpImage(pixels), 4)
print(f"Resampled to {sphere_map.npix} HEALPix pixels")


# A small codec trained on that map
config = CodecConfig.from_json(
    {
        "arch": {"order": 4, "num_stages": 2, "hyper_stages": 1},
        "loss": {"lambda": 0.01},
        "train": {"steps": 50, "batch_size": 2, "patch_side": 8, "learning_rate": 1e-3},
    }
)
model = CodecModel.create(config.arch, seed=0)
log = train(model, [sphere_map], config)
print(f"Final training loss: {log.losses[-1]:.5f}")

latent = encode_file(model, sphere_map, lmbda=config.loss.lmbda)
decoded = to_output_range(decode_file(model, latent))
print(
    f"{latent.rate_bits / sphere_map.npix:.3f} bpp at "
    + f"{wspsnr_healpix(sphere_map, decoded):.2f} dB WS-PSNR"
)


# Rate savings between two rate-distortion curves
anchor = RdCurve([1.0, 2.0, 4.0, 8.0], [30.0, 33.0, 36.0, 39.0])
test = RdCurve([0.8, 1.6, 3.2, 6.4], [30.0, 33.0, 36.0, 39.0])
print(f"BD-rate: {bd_rate(anchor, test):.1f}%")

#!/usr/bin/env python3
"""Build the dataset pair + interpolation baseline consumed by the decoder
superresolution package (dlsuperres/fixtures/).

The pair is a rank-2 traveling wake at full resolution and its x4
spatially downsampled version, exchanged as MFT files.  The baseline JSON
records the linear-interpolation RRMSE over the chronological test split
(last 20% of snapshots) that a trained model must beat.
"""
import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import modalrepair as mr  # noqa: E402

TEST_FRACTION = 0.2


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out",
        type=Path,
        default=Path(__file__).resolve().parents[1] / "dlsuperres" / "fixtures",
    )
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    spec = mr.WaveSpec(
        modes=(mr.WaveMode(1.0, (2.0, 0.0), 2.2),),
        grid=(64, 32),
        n_snapshots=120,
        dt=0.06,
        extents=(4.0, 1.0),
        envelope_width=0.35,
        mean_flow=0.0,
    )
    truth = mr.generate_cylinder_like(spec)
    coarse = mr.downsample(truth, (4, 4))

    cfg = mr.SuperresConfig(target_dims=(64, 32), strides=(4, 4), rank_rule=mr.RankRule.fixed_rank(2))
    base, mask = mr.place_on_target(coarse, cfg)
    interp = mr.interpolate_initial(base, mask)

    k = truth.shape[-1]
    test_start = k - int(round(TEST_FRACTION * k))
    baseline = mr.rrmse(truth[..., test_start:], interp[..., test_start:])

    mr.write_mft(args.out / "highres.mft", truth)
    mr.write_mft(args.out / "lowres.mft", coarse)
    payload = {
        "target_dims": [64, 32],
        "strides": [4, 4],
        "n_snapshots": k,
        "test_fraction": TEST_FRACTION,
        "test_start": test_start,
        "baseline_test_rrmse": baseline,
        "baseline": "piecewise-linear interpolation of the placed coarse points",
    }
    (args.out / "baseline.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote fixtures to {args.out} (baseline test RRMSE {100 * baseline:.2f}%)")


if __name__ == "__main__":
    main()

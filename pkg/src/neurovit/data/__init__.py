"""Volume ingestion, resizing, manifests, and synthetic data."""

from .manifest import (
    DatasetManifest,
    ManifestEntry,
    load_manifest,
    save_manifest,
    split_by_subject,
)
from .nifti import read_nifti
from .raw import read_raw, write_raw
from .synthetic import SynthSpec, ellipsoid_mask, generate_synthetic
from .volume import Volume, normalize, resize_trilinear

__all__ = [
    "DatasetManifest",
    "ManifestEntry",
    "SynthSpec",
    "Volume",
    "ellipsoid_mask",
    "generate_synthetic",
    "load_manifest",
    "normalize",
    "read_nifti",
    "read_raw",
    "resize_trilinear",
    "save_manifest",
    "split_by_subject",
    "write_raw",
]

"""
Storage module for run artifacts and manifests.
"""

from .artifact_store import ArtifactStore, RunManifest, load_manifest, verify_manifest

__all__ = [
    "ArtifactStore",
    "RunManifest",
    "load_manifest",
    "verify_manifest",
]

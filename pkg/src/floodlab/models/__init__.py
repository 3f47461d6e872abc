from floodlab.models.architectures import ArchName, build_cnn, build_fnn, build_model

__all__ = ["ArchName", "build_cnn", "build_fnn", "build_model"]

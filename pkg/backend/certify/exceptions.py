from circle.exceptions import CircleMaxError


class CertifyError(CircleMaxError):
    """Errors raised while writing or reading certificate artifacts."""


class ReportWriteError(CertifyError, OSError):
    """The certificate or trajectory file could not be written."""


class CertificateFormatError(CertifyError, ValueError):
    """A certificate JSON document does not match the certificate schema."""

"""Exception hierarchy shared across the pipeline."""


class KwspotError(Exception):
    """Base class for all errors raised by this package."""


# -- audio ------------------------------------------------------------------

class MalformedWav(KwspotError):
    """File is not a readable RIFF/WAVE container."""


class UnsupportedEncoding(KwspotError):
    """WAV encoding other than 16-bit integer PCM."""


class WrongSampleRate(KwspotError):
    """Clip sample rate differs from the canonical 16 kHz."""


class WrongLength(KwspotError):
    """Clip not normalized to exactly one second."""


class EmptyDataset(KwspotError):
    """Dataset root contains no labeled audio."""


class BadAudioFormat(KwspotError):
    """Streaming source does not provide 16 kHz mono PCM-16."""


# -- features ---------------------------------------------------------------

class InvalidConfig(KwspotError):
    """Feature extraction configuration violates its invariants."""


class ShapeMismatch(KwspotError):
    """Tensor shape does not match what the consumer expects."""


# -- model ------------------------------------------------------------------

class EmptyClass(KwspotError):
    """A label has no clips in the relevant split."""


class DivergedLoss(KwspotError):
    """Training loss became non-finite."""


class CorruptArtifact(KwspotError):
    """Artifact file is truncated or fails its checksum."""


class VersionMismatch(KwspotError):
    """Artifact was written by an incompatible format version."""


# -- quantization -----------------------------------------------------------

class EmptyCalibrationSet(KwspotError):
    """No representative inputs supplied for calibration."""


class UncalibratedTensor(KwspotError):
    """Quantization requested for a tensor with no calibrated range."""


class ArenaOverflow(KwspotError):
    """Inference tried to use memory outside the planned arena (planner bug)."""


class BudgetExceeded(KwspotError):
    """Arena cannot fit in the requested byte budget."""

    def __init__(self, minimal_bytes: int, budget_bytes: int):
        self.minimal_bytes = minimal_bytes
        self.budget_bytes = budget_bytes
        super().__init__(
            f"arena needs at least {minimal_bytes} bytes, budget is {budget_bytes}"
        )


# -- interpreter ------------------------------------------------------------

class UnknownKeyword(KwspotError):
    """Event keyword is not one of the 23 recognized labels."""


# -- evaluation -------------------------------------------------------------

class LabelMismatch(KwspotError):
    """Evaluated clips carry labels the model does not know."""


class EmptyMatrix(KwspotError):
    """Confusion matrix has no counted clips."""


# -- service ----------------------------------------------------------------

class PortInUse(KwspotError):
    """Demo service port is already bound."""


class ClientProtocolError(KwspotError):
    """Client sent a frame the service cannot parse."""

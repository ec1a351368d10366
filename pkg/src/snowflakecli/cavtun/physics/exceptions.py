"""
Custom exceptions for cavity-tunneling simulations.
"""


class CavityTunnelingError(Exception):
    """Base exception for simulation errors"""
    pass


class ParameterError(CavityTunnelingError):
    """Raised when a parameter record fails validation"""
    pass


class DomainViolationError(CavityTunnelingError):
    """Raised when an operation is called outside its validity domain"""
    pass


class AnalyticPathUnavailable(DomainViolationError):
    """Raised when the closed-form propagator cannot serve the request"""
    pass


class TruncationError(CavityTunnelingError):
    """Raised when a field cannot be truncated to the requested tail"""
    pass


class GridResolutionError(CavityTunnelingError):
    """Raised when the spatial grid does not converge the tunnel splitting"""
    def __init__(self, message: str, coarse_split: float = None, fine_split: float = None):
        super().__init__(message)
        self.coarse_split = coarse_split
        self.fine_split = fine_split


class IntegratorStepError(CavityTunnelingError):
    """Raised when a time step is too large for the split-operator integrator"""
    pass


class NoRevivalDetected(CavityTunnelingError):
    """Raised when an envelope shows no peak above the noise floor"""
    pass


class ProtocolError(CavityTunnelingError):
    """Raised when a control protocol is malformed"""
    pass

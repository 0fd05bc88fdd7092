"""Exception hierarchy shared by every layer of the analyzer."""


class TsaError(Exception):
    """Base class for all analyzer errors."""


# contracts


class ContractError(TsaError):
    pass


class UnknownMethodName(ContractError):
    def __init__(self, name, class_name=None):
        self.name = name
        self.class_name = class_name
        where = f" in class {class_name}" if class_name else ""
        super().__init__(f"unknown method name {name!r}{where}")


class OverlappingEnableDisable(ContractError):
    def __init__(self, method, overlap):
        self.method = method
        self.overlap = tuple(overlap)
        super().__init__(
            f"method {method!r} both enables and disables {{{', '.join(self.overlap)}}}"
        )


class InvalidAnnotation(ContractError):
    pass


class WellFormednessViolation(ContractError):
    pass


class AlphabetMismatch(ContractError):
    pass


class WidthMismatch(TsaError):
    pass


# automata


class StateExplosionLimit(TsaError):
    def __init__(self, limit, class_name=None):
        self.limit = limit
        self.class_name = class_name
        what = f"contract {class_name}" if class_name else "contract"
        super().__init__(f"{what} expands past the state limit of {limit}")


class UnknownState(TsaError):
    pass


# frontend


class TslSyntaxError(TsaError):
    def __init__(self, message, filename, line, col, expected=None):
        self.filename = filename
        self.line = line
        self.col = col
        self.expected = expected
        self.message = message
        super().__init__(f"{filename}:{line}:{col}: {message}")


class NameResolutionError(TsaError):
    pass


class TslTypeError(TsaError):
    pass


# analysis


class MissingSummary(TsaError):
    pass


class RecursionUnsupported(TsaError):
    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__("recursive call chain is not supported: " + " -> ".join(self.cycle))


# bench


class SpecInvalid(TsaError):
    pass

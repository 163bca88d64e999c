"""Exception hierarchy shared by every module of the package."""


class SubrecursiveError(RuntimeError): ...
class DomainError(SubrecursiveError, ValueError): ...
class EncodingError(SubrecursiveError, ValueError): ...
class DecodeError(SubrecursiveError, ValueError): ...
class CapacityError(SubrecursiveError): ...
class RecursionGuardError(SubrecursiveError): ...
class CacheError(SubrecursiveError): ...
class ConfigError(SubrecursiveError, ValueError): ...

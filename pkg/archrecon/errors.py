from typing import Any, List, Optional

EXIT_OK = 0
EXIT_CONFLICT = 2
EXIT_UNRESOLVED_LINK = 3
EXIT_CONFIGURATION = 4
EXIT_DIVERGENCE = 5


class ReconstructionError(Exception):
    """Base error; the CLI turns `exit_code` into the process exit status."""

    exit_code = EXIT_CONFIGURATION

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


# model-core

class ModelPathError(ReconstructionError):
    exit_code = EXIT_CONFIGURATION

    def __init__(self, path: str, detail: str):
        super().__init__(f"{detail}: {path!r}")
        self.path = path


class PathNotFound(ModelPathError):
    pass


class PathMalformed(ModelPathError):
    pass


class ModelFileError(ReconstructionError):
    exit_code = EXIT_CONFIGURATION


# configuration / definitions

class ConfigurationError(ReconstructionError):
    exit_code = EXIT_CONFIGURATION


class SchemaLoadError(ConfigurationError):
    def __init__(self, keyword: str, location: str, detail: str):
        where = f" at {location}" if location else ""
        super().__init__(f"{detail}: {keyword!r}{where}")
        self.keyword = keyword
        self.location = location


class UnknownKeyword(SchemaLoadError):
    def __init__(self, keyword: str, location: str = ""):
        super().__init__(keyword, location, "unknown schema keyword")


class BadKeywordShape(SchemaLoadError):
    def __init__(self, keyword: str, location: str = "", reason: str = ""):
        detail = "bad keyword shape" + (f" ({reason})" if reason else "")
        super().__init__(keyword, location, detail)


class BadPattern(SchemaLoadError):
    def __init__(self, pattern: str, location: str = "", reason: str = ""):
        detail = "bad regular expression" + (f" ({reason})" if reason else "")
        super().__init__(pattern, location, detail)


class DefinitionError(ConfigurationError):
    """A declarative extractor definition failed to load."""


class DuplicateExtractorId(ConfigurationError):
    def __init__(self, extractor_id: str):
        super().__init__(f"extractor id registered twice: {extractor_id!r}")
        self.extractor_id = extractor_id


class MalformedLinkError(ConfigurationError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"malformed link at {path!r}: {reason}")
        self.path = path


# aggregation

class AggregationConflict(ReconstructionError):
    exit_code = EXIT_CONFLICT

    def __init__(self, conflicts: List[Any]):
        self.conflicts = list(conflicts)
        super().__init__("; ".join(c.render() for c in self.conflicts))


# orchestration

class DivergenceError(ReconstructionError):
    exit_code = EXIT_DIVERGENCE


class ExtractorError(ReconstructionError):
    exit_code = EXIT_CONFIGURATION

    def __init__(self, extractor_id: str, cause: BaseException, entity_path: str = ""):
        super().__init__(f"extractor {extractor_id!r} failed on {entity_path or '/'}: {cause}")
        self.extractor_id = extractor_id
        self.cause = cause
        self.entity_path = entity_path


# extractor API

class ExtractorAPIError(ReconstructionError):
    pass


class RootMissing(ExtractorAPIError):
    pass


class FileMissing(ExtractorAPIError):
    pass


class PathEscapesRoot(ExtractorAPIError):
    pass


class ParseError(ExtractorAPIError):
    def __init__(self, detail: str, line: Optional[int] = None, column: Optional[int] = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{detail}{where}")
        self.message = detail
        self.line = line
        self.column = column


class TemplateError(ExtractorAPIError):
    pass


# linking

class UnresolvedLinksError(ReconstructionError):
    exit_code = EXIT_UNRESOLVED_LINK

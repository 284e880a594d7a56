"""Storage of experiment artifacts."""
import enum
import logging
import os
import pathlib
import typing

import attr
import zope.interface

from revivalkit import exceptions

logger = logging.getLogger(__name__)

A = typing.TypeVar("A", bound="Artifact")
AK = typing.TypeVar("AK", bound="ArtifactKind")
S = typing.TypeVar("S", bound="Storage")
IM = typing.TypeVar("IM", bound="InMemory")
DB = typing.TypeVar("DB", bound="Directory")


@enum.unique
class ArtifactKind(enum.Enum):
    """What an artifact holds; the value is its file suffix."""

    spectrum = "spectrum.txt"
    survival = "survival.csv"
    peaks = "peaks.csv"
    schmidt = "schmidt.csv"
    report = "report.json"
    config = "config.yaml"

    def __str__(self: AK) -> str:
        """Return the value of the enum instead of a repr."""
        return str(self.value)

    @classmethod
    def from_value(
        cls: typing.Type[AK], kind: typing.Union[str, "ArtifactKind"]
    ) -> AK:
        """Convert value to an ArtifactKind value."""
        if isinstance(kind, cls):
            return kind
        return cls.from_name(typing.cast(str, kind))

    @classmethod
    def from_name(cls: typing.Type[AK], name: str) -> AK:
        """Look a kind up by its name or its file suffix."""
        for member in cls:
            if name in (member.name, member.value):
                return member
        raise ValueError(f"unknown artifact kind {name!r}")

    @classmethod
    def for_filename(cls: typing.Type[AK], filename: str) -> AK:
        """Return the kind whose suffix ends ``filename``."""
        for member in cls:
            if filename.endswith(member.value):
                return member
        raise ValueError(f"no artifact kind matches {filename!r}")


def _kind_from_value(value: typing.Union[str, ArtifactKind]) -> ArtifactKind:
    return ArtifactKind.from_value(value)


@attr.s(frozen=True)
class Artifact:
    """A named piece of text produced by a pipeline stage."""

    #: Stem shared by every artifact of one experiment, e.g. ``xy_n6``
    stem: str = attr.ib()
    kind: ArtifactKind = attr.ib(converter=_kind_from_value)
    content: str = attr.ib(repr=False)

    @stem.validator
    def _check_stem(
        self: A, attribute: "attr.Attribute[str]", value: str
    ) -> None:
        if not value or os.sep in value or value.startswith("."):
            raise exceptions.StorageBackendError(
                f"artifact stem {value!r} is not a plain file name"
            )

    @property
    def filename(self: A) -> str:
        """File name of the artifact inside an output directory."""
        return f"{self.stem}.{self.kind.value}"

    @classmethod
    def from_filename(
        cls: typing.Type[A], filename: str, content: str
    ) -> A:
        """Rebuild an artifact from its file name."""
        kind = ArtifactKind.for_filename(filename)
        stem = filename[: -len(kind.value) - 1]
        return cls(stem, kind, content)


class IBackend(zope.interface.Interface):
    """Definition of the interface expected for a storage backend."""

    def save(
        artifacts: typing.Sequence[Artifact],  # noqa: N805
        replace: bool = False,
    ) -> None:
        """Save the artifacts to the backend.

        :param bool replace:
            Overwrite artifacts already stored under the same name. Without
            it, storing different content under a taken name raises
            :class:`~revivalkit.exceptions.ConflictError`.
        """

    def load(stem: str, kind: ArtifactKind) -> Artifact:  # noqa: N805
        """Return one artifact or raise ``MissingArtifactError``."""

    def list(
        stem: typing.Optional[str] = None,  # noqa: N805
        kind: typing.Optional[ArtifactKind] = None,
    ) -> typing.Sequence[Artifact]:
        """List stored artifacts.

        :param str stem:
            Restrict the listing to one experiment.
        :param kind:
            Restrict the listing to one kind of artifact.
        """

    def remove(artifact: Artifact) -> None:  # noqa: N805
        """Remove an artifact from the backend."""

    def drop_for(stem: str) -> None:  # noqa: N805
        """Remove every artifact of an experiment."""


def _matches(
    artifact: Artifact,
    stem: typing.Optional[str],
    kind: typing.Optional[ArtifactKind],
) -> bool:
    return (stem is None or artifact.stem == stem) and (
        kind is None or artifact.kind is kind
    )


@zope.interface.implementer(IBackend)
@attr.s
class InMemory:
    """In memory storage for artifacts, used by tests and dry runs."""

    _artifacts: typing.MutableMapping[str, Artifact] = attr.ib(factory=dict)

    def save(
        self: IM, artifacts: typing.Iterable[Artifact], replace: bool = False
    ) -> None:
        """Persist artifacts to the in memory backend."""
        for artifact in artifacts:
            stored = self._artifacts.get(artifact.filename)
            if (
                stored is not None
                and not replace
                and stored.content != artifact.content
            ):
                raise exceptions.ConflictError(
                    f"{artifact.filename} already holds other content"
                )
            self._artifacts[artifact.filename] = artifact

    def load(self: IM, stem: str, kind: ArtifactKind) -> Artifact:
        """Return one stored artifact."""
        filename = Artifact(stem, kind, "").filename
        try:
            return self._artifacts[filename]
        except KeyError:
            raise exceptions.MissingArtifactError(
                f"no artifact {filename}"
            ) from None

    def list(
        self: IM,
        stem: typing.Optional[str] = None,
        kind: typing.Optional[ArtifactKind] = None,
    ) -> typing.Sequence[Artifact]:
        """List stored artifacts, sorted by file name."""
        return [
            a
            for _, a in sorted(self._artifacts.items())
            if _matches(a, stem, kind)
        ]

    def remove(self: IM, artifact: Artifact) -> None:
        """Remove an artifact from the in memory backend."""
        self._artifacts.pop(artifact.filename, None)

    def drop_for(self: IM, stem: str) -> None:
        """Remove every artifact of an experiment."""
        for artifact in self.list(stem=stem):
            self.remove(artifact)


@zope.interface.implementer(IBackend)
@attr.s(frozen=True)
class Directory:
    """Flat files in one output directory."""

    root: pathlib.Path = attr.ib(converter=pathlib.Path)

    def _path(self: DB, artifact: Artifact) -> pathlib.Path:
        return self.root / artifact.filename

    def save(
        self: DB, artifacts: typing.Iterable[Artifact], replace: bool = False
    ) -> None:
        """Write each artifact to its own file."""
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise exceptions.StorageBackendError(str(exc)) from exc
        for artifact in artifacts:
            path = self._path(artifact)
            if (
                path.exists()
                and not replace
                and path.read_text(encoding="utf-8") != artifact.content
            ):
                raise exceptions.ConflictError(
                    f"{path} already holds other content"
                )
            path.write_text(artifact.content, encoding="utf-8")
            logger.info("wrote %s", path)

    def load(self: DB, stem: str, kind: ArtifactKind) -> Artifact:
        """Read one artifact from its file."""
        artifact = Artifact(stem, kind, "")
        path = self._path(artifact)
        try:
            content = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise exceptions.MissingArtifactError(
                f"no artifact {path}"
            ) from None
        return attr.evolve(artifact, content=content)

    def list(
        self: DB,
        stem: typing.Optional[str] = None,
        kind: typing.Optional[ArtifactKind] = None,
    ) -> typing.Sequence[Artifact]:
        """List the artifacts found in the directory."""
        if not self.root.is_dir():
            return []
        found = []
        for path in sorted(self.root.iterdir()):
            try:
                artifact = Artifact.from_filename(
                    path.name, path.read_text(encoding="utf-8")
                )
            except (ValueError, exceptions.StorageBackendError):
                continue
            if _matches(artifact, stem, kind):
                found.append(artifact)
        return found

    def remove(self: DB, artifact: Artifact) -> None:
        """Delete an artifact's file if it exists."""
        self._path(artifact).unlink(missing_ok=True)

    def drop_for(self: DB, stem: str) -> None:
        """Delete every file of an experiment."""
        for artifact in self.list(stem=stem):
            self.remove(artifact)


@attr.s(frozen=True)
class Storage:
    """Abstraction for a backend holding experiment artifacts."""

    backend: IBackend = attr.ib(validator=attr.validators.provides(IBackend))

    def store(
        self: S,
        stem: str,
        contents: typing.Mapping[ArtifactKind, str],
        replace: bool = False,
    ) -> typing.List[Artifact]:
        """Save several artifacts of one experiment at once."""
        artifacts = [
            Artifact(stem, kind, content) for kind, content in contents.items()
        ]
        self.backend.save(artifacts, replace=replace)
        return artifacts

    def read(self: S, stem: str, kind: ArtifactKind) -> str:
        """Return the content of one artifact."""
        return typing.cast(str, self.backend.load(stem, kind).content)

    def find(
        self: S,
        stem: str,
        kind: typing.Optional[ArtifactKind] = None,
    ) -> typing.Iterable[Artifact]:
        """List artifacts stored for a given experiment.

        :param str stem:
            The experiment whose artifacts are listed.
        :param kind:
            Restrict the listing to one kind of artifact.
        :returns:
            An iterable that contains Artifact instances.
        """
        return self.backend.list(stem=stem, kind=kind)

    def require(self: S, stem: str, *kinds: ArtifactKind) -> None:
        """Fail unless every listed artifact of ``stem`` is present."""
        present = {a.kind for a in self.find(stem)}
        missing = [str(k) for k in kinds if k not in present]
        if missing:
            raise exceptions.MissingArtifactError(
                f"{stem} lacks {', '.join(missing)}"
            )

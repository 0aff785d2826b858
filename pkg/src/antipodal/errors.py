"""Exception base shared by every module of the package."""


class AntipodalError(Exception):
    """Base class for domain errors.

    The CLI reports these as ``<module>.<ClassName>`` and exits with status 1.
    """

    @property
    def code(self) -> str:
        module = type(self).__module__.rsplit(".", 1)[-1]
        return f"{module}.{type(self).__name__}"

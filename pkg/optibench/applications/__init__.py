from optibench.applications.base import ApplicationBase
from optibench.applications.maxsat import MaxSatApplication
from optibench.applications.pvc import PvcApplication
from optibench.applications.tsp import TspApplication
from optibench.exceptions import ParameterError

APPLICATIONS: dict[str, ApplicationBase] = {
    app.name: app for app in (PvcApplication(), TspApplication(), MaxSatApplication())
}


def get_application(name: str) -> ApplicationBase:
    try:
        return APPLICATIONS[name]
    except KeyError:
        raise ParameterError(
            f"unknown application '{name}', expected one of {sorted(APPLICATIONS)}"
        ) from None


__all__ = ["APPLICATIONS", "ApplicationBase", "get_application"]

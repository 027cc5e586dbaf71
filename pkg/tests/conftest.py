"""Shared fixtures: an in-memory report store and small reference models."""

from collections.abc import Iterator

import pytest
from relhyp.db.base import Base
from relhyp.models.groups import CayleyBall, CosetSpec, FreeSpec
from relhyp.models.peripherals import PeripheralFamily
from relhyp.services.cayley import build_ball, peripheral_cosets
from sqlalchemy import create_engine
from sqlalchemy.orm import Session, sessionmaker


@pytest.fixture()
def db() -> Iterator[Session]:
    """Yield an in-memory SQLite session with the schema created."""
    engine = create_engine("sqlite:///:memory:")
    Base.metadata.create_all(engine)
    session = sessionmaker(bind=engine, expire_on_commit=False)()
    try:
        yield session
    finally:
        session.close()


@pytest.fixture(scope="session")
def free2_ball() -> CayleyBall:
    return build_ball(FreeSpec(rank=2), 3)


@pytest.fixture(scope="session")
def free2_cosets(free2_ball: CayleyBall) -> PeripheralFamily:
    """Cosets of <a> with at least three vertices in the radius-3 ball."""
    return peripheral_cosets(FreeSpec(rank=2), free2_ball, [CosetSpec(subgroup=("a", "A"))])

"""Database session factory."""

from collections.abc import Iterator
from contextlib import contextmanager

from sqlalchemy.orm import Session, sessionmaker

from relhyp.db.engine import engine

SessionLocal = sessionmaker(bind=engine, expire_on_commit=False)


@contextmanager
def session_scope() -> Iterator[Session]:
    """Yield a session and close it afterwards; callers commit explicitly."""
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()

"""Bearer-token authentication and the three-role authorization policy.

Tokens are never stored; the users store keeps only their SHA-256.
"""

from __future__ import annotations

import hashlib
import secrets
import time

from fablink.errors import FablinkError
from fablink.store.records import USER_ROLES, User
from fablink.store.store import LinkageStore


class UnauthorizedError(FablinkError):
    """Missing or unknown credentials (HTTP 401)."""


class ForbiddenError(FablinkError):
    """Authenticated but not allowed (HTTP 403)."""


# action -> roles allowed to perform it
POLICY = {
    "read": USER_ROLES,
    "predict": USER_ROLES,
    "create_article": ("designer", "admin"),
    "upload_variant": ("designer", "admin"),
    "post_feedback": ("manufacturer", "admin"),
    "train": ("admin",),
    "manage_users": ("admin",),
}


def token_sha256(token: str) -> str:
    return hashlib.sha256(token.encode("utf-8")).hexdigest()


def authenticate(store: LinkageStore, authorization: str | None) -> User:
    """Resolve an ``Authorization: Bearer <token>`` header to a User."""
    if not authorization:
        raise UnauthorizedError("missing Authorization header")
    scheme, _, token = authorization.partition(" ")
    if scheme.lower() != "bearer" or not token.strip():
        raise UnauthorizedError("Authorization header must be 'Bearer <token>'")
    user = store.user_by_token_sha256(token_sha256(token.strip()))
    if user is None:
        raise UnauthorizedError("unknown token")
    return user


def authorize(user: User, action: str) -> None:
    roles = POLICY.get(action)
    if roles is None:
        raise ForbiddenError(f"unknown action {action!r}")
    if user.role not in roles:
        raise ForbiddenError(f"role {user.role!r} may not {action.replace('_', ' ')}")


def create_user(store: LinkageStore, user_id: str, role: str) -> tuple[User, str]:
    """Create a user with a fresh random token; the token is returned
    exactly once and only its hash is persisted."""
    token = secrets.token_urlsafe(32)
    user = User(
        user_id=user_id,
        role=role,
        token_sha256=token_sha256(token),
        created_ts_ms=int(time.time() * 1000),
    )
    store.append_record(user)
    return user, token


def bootstrap_admin(store: LinkageStore) -> tuple[User, str] | None:
    """First-run setup: create the initial admin when no users exist."""
    if store.list_users():
        return None
    return create_user(store, "admin", "admin")

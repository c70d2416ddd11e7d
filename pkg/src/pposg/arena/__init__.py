from .service import (ArenaSession, PROTOCOL_VERSION, SessionError,
                      create_app, frame_schema, load_pursuer_policy, serve)

__all__ = ["ArenaSession", "PROTOCOL_VERSION", "SessionError",
           "create_app", "frame_schema", "load_pursuer_policy", "serve"]

"""Wire protocol plus the local and TCP transports."""
from .codec import (
    MAX_FRAME, PROTOCOL_VERSION, Assign, FrameDecoder, Hello, HelloAck, LoadProgram,
    Message, ProtoError, Result, Shutdown, decode_frames, encode_frame, fnv1a64,
)
from .local import LocalTransport, local_transport
from .tcp import DEFAULT_PORT, TcpCoordinator, parse_address, run_worker, serve_coordinator

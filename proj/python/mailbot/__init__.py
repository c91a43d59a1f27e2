"""Rule-based e-mail triage: classify, file attachments, draft replies."""

try:
    from ._mailbot import *  # noqa: F401,F403
    from ._mailbot import __version__  # noqa: F401
except ImportError:  # pragma: no cover - source builds put _mailbot on sys.path
    from _mailbot import *  # type: ignore # noqa: F401,F403
    from _mailbot import __version__  # type: ignore # noqa: F401

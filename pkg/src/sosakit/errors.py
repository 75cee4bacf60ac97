from __future__ import annotations


class ParseError(ValueError):
    """Syntax error in a Turtle or JSON-LD document, with 1-based position."""

    def __init__(self, message: str, line: int = 1, column: int = 1, snippet: str = ""):
        self.message = message
        self.line = max(1, line)
        self.column = max(1, column)
        self.snippet = snippet
        super().__init__(f"line {self.line}, column {self.column}: {message}")

    @classmethod
    def at(cls, text: str, offset: int, message: str) -> "ParseError":
        offset = max(0, min(offset, len(text)))
        line = text.count("\n", 0, offset) + 1
        start = text.rfind("\n", 0, offset) + 1
        end = text.find("\n", offset)
        if end == -1:
            end = len(text)
        return cls(message, line, offset - start + 1, text[start:end])

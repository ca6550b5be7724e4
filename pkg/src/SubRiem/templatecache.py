"""
--- Template Cache ---

A class for caching the plain text report templates used by `--text`.
Templates use `{KEY}` placeholders and `{if flag}...{endif}` sections,
where a flag is a report name optionally negated with `not`.

License:  Apache-2.0 license
"""

import os
import re
from typing import Final

try:
    from src.SubRiem.utils.fileutils import read
    from src.SubRiem.utils.cons import TEMPLATES_DIRECTORY_PATH
except ImportError:
    from utils.fileutils import read
    from utils.cons import TEMPLATES_DIRECTORY_PATH

CONDITION_PATTERN: Final[re.Pattern] = re.compile(r"((?:not\s+)*)([A-Za-z_]\w*)")
SECTION_PATTERN: Final[re.Pattern] = re.compile(
    r"\{if ([^{}]*)\}\n?((?:(?!\{if |\{endif\}).)*)\{endif\}\n?", re.DOTALL
)
PLACEHOLDER_PATTERN: Final[re.Pattern] = re.compile(r"\{([A-Z][A-Z0-9_]*)\}")

def evaluate_condition(replaces: dict, condition: str) -> bool:
    """
    Truth value of a section condition: a name, preceded by any number of `not`.

    Args:
        replaces (dict): The render arguments.
        condition (str): The condition text.

    Returns:
        bool: The truth of the named value, False for unknown names.

    Raises:
        ValueError: If the condition is not of the form `[not ...] name`.
    """

    match = CONDITION_PATTERN.fullmatch(condition.strip())
    if match is None:
        raise ValueError(f"Unsupported template condition '{condition}'.")

    value = bool(replaces.get(match.group(2), False))
    negations = len(match.group(1).split())

    return value if negations % 2 == 0 else not value


class TemplateCache:
    """
    Report templates of one directory, read once and kept by name.
    """


    def __init__(self, template_dir: str = TEMPLATES_DIRECTORY_PATH) -> None:
        """
        Args:
            template_dir (str): Directory holding the `*.txt` templates.
        """

        self.template_dir = template_dir
        self._templates = self._load(template_dir)


    @staticmethod
    def _load(template_dir: str) -> dict:
        if not os.path.isdir(template_dir):
            return {}

        templates = {}
        for file_name in sorted(os.listdir(template_dir)):
            stem, extension = os.path.splitext(file_name)
            if extension != ".txt":
                continue

            content = read(os.path.join(template_dir, file_name))
            if content is not None:
                templates[stem] = content

        return templates


    @property
    def names(self) -> list:
        return sorted(self._templates)


    @staticmethod
    def replace_vars(template: str, replaces: dict) -> str:
        """
        Render a template string.

        Sections are resolved innermost first. A kept section loses the line
        break after `{if ...}` and a section drops the line break after
        `{endif}`. Placeholders are then filled in a single pass from the
        upper-cased keys; unknown placeholders stay as they are.

        Args:
            template (str): The template string.
            replaces (dict): The render arguments.

        Returns:
            str: The rendered template.

        Raises:
            ValueError: If `{if ...}` and `{endif}` do not pair up.
        """

        def resolve(match: re.Match) -> str:
            return match.group(2) if evaluate_condition(replaces, match.group(1)) else ""

        rendered, count = SECTION_PATTERN.subn(resolve, template)
        while count:
            rendered, count = SECTION_PATTERN.subn(resolve, rendered)

        if "{endif}" in rendered:
            raise ValueError("Unmatched endif found.")
        if "{if " in rendered:
            raise ValueError("Unmatched if found.")

        values = {str(key).upper(): str(value) for key, value in replaces.items()}

        return PLACEHOLDER_PATTERN.sub(
            lambda match: values.get(match.group(1), match.group(0)), rendered
        )


    def render(self, template_name: str, **kwargs) -> str:
        """
        Render the specified template with the provided keyword arguments.

        Args:
            template_name (str): The name of the template to render.
            **kwargs: The keyword arguments to pass to the template.

        Returns:
            str: The rendered template, empty for an unknown template.
        """

        template = self._templates.get(template_name)
        if template is None:
            return ""

        return self.replace_vars(template, kwargs)


if __name__ == "__main__":
    print("templatecache.py: This file is not designed to be executed.")

# encoding: utf-8

"""
Exceptions raised by ``qcheshire``.

All of them derive from |CheshireError|, so a caller can catch one type.
"""


class CheshireError(Exception):
    pass


class DomainError(CheshireError, ValueError):
    pass


class DegeneratePostselectionError(CheshireError):
    pass


class UndefinedVisibilityError(CheshireError):
    pass


class FitError(CheshireError):
    pass


class NoSolutionError(CheshireError):
    pass


class ConfigError(CheshireError):
    '''
    A configuration problem, anchored to a file and line where known.

    ::

        >>> str(ConfigError('theta1: not an angle', path='run.yaml', line=4))
        'run.yaml:4: theta1: not an angle'

    '''

    def __init__(self, message, path=None, line=None):
        super().__init__(message)
        self.message = message
        self.path = path
        self.line = line

    def __str__(self):
        where = self.path or '<config>'
        if self.line is not None:
            where = '{}:{}'.format(where, self.line)
        return '{}: {}'.format(where, self.message)


class SchemaError(CheshireError):
    '''
    A counts file that does not follow ``phase_rad,counts,duration_s``.
    ``row`` is the 1-based line number in the file.
    '''

    def __init__(self, message, path=None, row=None):
        super().__init__(message)
        self.message = message
        self.path = path
        self.row = row

    def __str__(self):
        return '{}: row {}: {}'.format(self.path or '<counts>', self.row, self.message)

# encoding: utf-8

"""
Tables
======

RST grid tables for the reproduction report,
and the ``value(uncertainty)`` notation used in them.

.. code-block:: py

   import qcheshire.table as table

"""

from math import floor, log10


def table_line(widths, header=False):
    linechar = '=' if header else '-'
    parts = [linechar * width for width in widths]
    if parts:
        parts = [''] + parts + ['']
    return '+'.join(parts)


def get_field_width(field_text):
    return max(len(s) for s in field_text.split('\n'))


def split_row_into_lines(row):
    row = [field.split('\n') for field in row]
    height = max(len(field_lines) for field_lines in row)
    return [[field_lines[i] if i < len(field_lines) else '' for field_lines in row]
            for i in range(height)]


def get_column_widths(table):
    widths = []
    for row in table:
        if len(row) >= len(widths):
            widths.extend([0] * (len(row) - len(widths)))
        for i, field_text in enumerate(row):
            widths[i] = max(widths[i], get_field_width(field_text))
    return widths


def pad_fields(row, widths):
    'Pads fields of the given row, so each field lines up with the others.'
    return [' %-{}s '.format(w) % field.strip() for field, w in zip(row, widths)]


def draw_table(rows, header=True, indent=''):
    '''
    Render ``rows`` (lists of strings; the first row is the header when
    ``header``) as the lines of an RST grid table.

    ::

        >>> print('\\n'.join(draw_table([['a', 'bb'], ['1', '2']])))
        +---+----+
        | a | bb |
        +===+====+
        | 1 | 2  |
        +---+----+

    '''
    table = [[str(field) for field in row] for row in rows]
    if not table:
        return []
    width = max(len(row) for row in table)
    table = [row + [''] * (width - len(row)) for row in table]
    col_widths = get_column_widths(table)
    sep_col_widths = [w + 2 for w in col_widths]
    header_line = table_line(sep_col_widths, header=header)
    normal_line = table_line(sep_col_widths)
    output = [indent + normal_line]
    for n, row in enumerate(table):
        for row_line in split_row_into_lines(row):
            output.append(indent + '|'.join([''] + pad_fields(row_line, col_widths) + ['']))
        output.append(indent + (header_line if n == 0 else normal_line))
    return output


def paren(value, uncertainty=None, decimals=3):
    '''
    ``value(u)`` with u in units of the last shown digit.

    ::

        >>> paren(0.1513, 0.008)
        '0.151(8)'
        >>> paren(2526.3, 7)
        '2526(7)'
        >>> paren(0.86, 0.21)
        '0.86(21)'
        >>> paren(0.6125)
        '0.613'

    '''
    if uncertainty is None or uncertainty <= 0:
        return '{:.{}f}'.format(value, decimals)
    places = -int(floor(log10(uncertainty)))
    if round(uncertainty * 10 ** places) < 3:
        places += 1
    places = max(places, 0)
    digit = int(round(uncertainty * 10 ** places))
    return '{:.{}f}({})'.format(value, places, digit)

# vim: ts=4 sw=4 sts=4 et noai nocin nosi

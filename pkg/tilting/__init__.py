from .tilting import (Mutation, NotMutable, SpecialTilting, TiltingPoset, TiltingReport, check_tilting,
                      check_tilting_T1T2, enumerate_tilting, leq, mutate, special_tilting)

__all__ = ['Mutation', 'NotMutable', 'SpecialTilting', 'TiltingPoset', 'TiltingReport', 'check_tilting',
           'check_tilting_T1T2', 'enumerate_tilting', 'leq', 'mutate', 'special_tilting']

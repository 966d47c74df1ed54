# -*- coding: utf-8 -*-
"""
邻近算子库

提供闭式邻近算子、函数目录与一维暴力求解参照。
"""

# -*- coding: utf-8 -*-
"""
问题核心模块

提供向量类型、线性耦合算子与鞍点问题定义。
"""
